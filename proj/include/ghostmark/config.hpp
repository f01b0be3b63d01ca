#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "ghostmark/errors.hpp"
#include "ghostmark/text.hpp"

namespace ghostmark {

/// "key = value" lines, one per line, '#' starts a comment. Keys use the
/// same spelling as the long command-line flags without the leading dashes.
inline std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open config file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            fail(errc::invalid_argument,
                 "config line " + std::to_string(line_no) + " is not key=value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            fail(errc::invalid_argument,
                 "config line " + std::to_string(line_no) + " has an empty key");
        out[key] = value;
    }
    return out;
}

/// "max-parallel" -> "GHOSTMARK_MAX_PARALLEL"
inline std::string config_env_name(const std::string& key) {
    std::string n = "GHOSTMARK_";
    for (char c : key) {
        if (c == '-')
            n += '_';
        else if (c >= 'a' && c <= 'z')
            n += static_cast<char>(c - 'a' + 'A');
        else
            n += c;
    }
    return n;
}

/// Settings below the command line: environment first, then config file.
class config_layers {
public:
    config_layers() = default;
    explicit config_layers(std::map<std::string, std::string> file_values)
        : file_(std::move(file_values)) {}

    std::optional<std::string> get(const std::string& key) const {
        if (const char* v = std::getenv(config_env_name(key).c_str()); v && *v)
            return std::string(v);
        auto it = file_.find(key);
        if (it != file_.end()) return it->second;
        return std::nullopt;
    }

private:
    std::map<std::string, std::string> file_;
};

namespace detail {

inline void assign_config(std::string& var, const std::string& s, const std::string&) { var = s; }

inline void assign_config(double& var, const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        var = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
        fail(errc::invalid_argument, key + " must be a number, got \"" + s + "\"");
    }
}

inline void assign_config(std::uint64_t& var, const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        var = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
        fail(errc::invalid_argument,
             key + " must be a non-negative integer, got \"" + s + "\"");
    }
}

inline void assign_config(int& var, const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        var = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
        fail(errc::invalid_argument, key + " must be an integer, got \"" + s + "\"");
    }
}

inline void assign_config(bool& var, const std::string& s, const std::string& key) {
    std::string v = to_lower_ascii(s);
    if (v == "1" || v == "true" || v == "yes" || v == "on")
        var = true;
    else if (v == "0" || v == "false" || v == "no" || v == "off")
        var = false;
    else
        fail(errc::invalid_argument, key + " must be a boolean, got \"" + s + "\"");
}

} // namespace detail

/// Fills var from environment or config file unless the flag was given on
/// the command line (flag_count > 0): flags > environment > file.
template <typename T>
void resolve_config(const config_layers& layers, std::size_t flag_count, const std::string& key,
                    T& var) {
    if (flag_count > 0) return;
    if (auto v = layers.get(key)) detail::assign_config(var, *v, key);
}

} // namespace ghostmark
