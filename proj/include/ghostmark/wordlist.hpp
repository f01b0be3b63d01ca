#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ghostmark/errors.hpp"
#include "ghostmark/hash.hpp"
#include "ghostmark/text.hpp"

namespace ghostmark {

enum class wordlist_format { eff_dice, plain_lines };

/// Lowercased, whitespace-trimmed form in which every word is stored.
inline std::string normalize_word(std::string_view raw) {
    return to_lower_ascii(trim(raw));
}

class wordlist {
public:
    wordlist() = default;
    wordlist(std::string name, std::vector<std::string> words)
        : name_(std::move(name)), words_(std::move(words)) {
        for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
        digest_ = digest_words(words_);
    }

    const std::string& name() const { return name_; }
    const std::vector<std::string>& words() const { return words_; }
    std::size_t size() const { return words_.size(); }
    const std::string& at(std::size_t i) const { return words_.at(i); }

    bool contains(std::string_view w) const {
        return index_.find(std::string(w)) != index_.end();
    }

    /// FNV-1a 64 over every word followed by '\n', as lowercase hex.
    const std::string& digest() const { return digest_; }

private:
    std::string name_;
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
    std::string digest_;
};

namespace detail {

inline bool valid_dice_index(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '1' || c > '6') return false;
    }
    return true;
}

} // namespace detail

/// Parses a wordlist from a stream. Every line must produce a word; a single
/// trailing newline at end of file is tolerated, any other blank line is an
/// error. In eff-dice format each line is "<dice index><TAB><word>".
inline wordlist load_wordlist(std::istream& in, wordlist_format fmt, std::string name) {
    std::vector<std::string> words;
    std::unordered_map<std::string, std::size_t> seen; // word -> first line
    std::string line;
    std::size_t line_no = 0;
    bool pending_blank = false;
    std::size_t pending_blank_line = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (pending_blank)
            fail(errc::empty_word, "blank line " + std::to_string(pending_blank_line));
        if (trim(line).empty()) {
            // May be the trailing newline; error only if more lines follow.
            pending_blank = true;
            pending_blank_line = line_no;
            continue;
        }

        std::string raw = line;
        if (fmt == wordlist_format::eff_dice) {
            auto tab = line.find('\t');
            if (tab == std::string::npos)
                fail(errc::malformed_dice_index,
                     "line " + std::to_string(line_no) + " has no tab separator");
            if (!detail::valid_dice_index(std::string_view(line).substr(0, tab)))
                fail(errc::malformed_dice_index,
                     "line " + std::to_string(line_no) + " index is not digits 1-6");
            raw = line.substr(tab + 1);
        }

        std::string w = normalize_word(raw);
        if (w.empty())
            fail(errc::empty_word, "line " + std::to_string(line_no));
        for (char c : w) {
            if (is_ascii_space(c))
                fail(errc::invalid_word,
                     "line " + std::to_string(line_no) + " contains internal whitespace");
        }
        auto [it, inserted] = seen.emplace(w, line_no);
        if (!inserted)
            fail(errc::duplicate_word, "\"" + w + "\" at line " + std::to_string(line_no) +
                                           " first seen at line " + std::to_string(it->second));
        words.push_back(std::move(w));
    }

    if (words.empty()) fail(errc::empty_list, "wordlist has no words");
    return wordlist(std::move(name), std::move(words));
}

inline wordlist load_wordlist_file(const std::string& path, wordlist_format fmt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open wordlist file " + path);
    auto slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    return load_wordlist(in, fmt, std::move(name));
}

inline void serialize_plain_lines(const wordlist& wl, std::ostream& out) {
    for (const auto& w : wl.words()) out << w << '\n';
}

/// True when the list has exactly one word per dice outcome, i.e. size is
/// 6^dice_count. dice_count outside [1,8] is a caller bug.
inline bool validate_dice_coverage(const wordlist& wl, int dice_count) {
    if (dice_count < 1 || dice_count > 8)
        fail(errc::invalid_argument, "dice_count must be in [1,8]");
    std::uint64_t expect = 1;
    for (int i = 0; i < dice_count; ++i) expect *= 6;
    return wl.size() == expect;
}

} // namespace ghostmark
