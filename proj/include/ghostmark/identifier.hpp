#pragma once

#include <cstdint>
#include <ctime>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "ghostmark/errors.hpp"
#include "ghostmark/hash.hpp"
#include "ghostmark/rng.hpp"
#include "ghostmark/wordlist.hpp"

namespace ghostmark {

struct ghost_identifier {
    std::string id;
    std::string owner_id;
    std::vector<std::string> words;
    std::string wordlist_digest;
    std::optional<std::string> prefix;
    std::string terminal = ".";
    std::string created_at; // RFC 3339 UTC

    std::size_t q() const { return words.size(); }
};

/// q words drawn independently and uniformly with replacement, matching dice
/// semantics. q must be at least 4; shorter passphrases do not carry enough
/// entropy to be treated as unique.
inline std::vector<std::string> generate_passphrase(const wordlist& wl, std::size_t q, rng& r) {
    if (q < 4) fail(errc::length_too_short, "q=" + std::to_string(q) + ", minimum is 4");
    if (wl.size() < 2) fail(errc::invalid_argument, "wordlist must have at least 2 words");
    std::vector<std::string> out;
    out.reserve(q);
    for (std::size_t i = 0; i < q; ++i) out.push_back(wl.at(r.below(wl.size())));
    return out;
}

inline std::string render_sentence(const ghost_identifier& gid) {
    std::string s;
    if (gid.prefix && !gid.prefix->empty()) {
        s += *gid.prefix;
        s += ' ';
    }
    for (std::size_t i = 0; i < gid.words.size(); ++i) {
        if (i) s += ' ';
        s += gid.words[i];
    }
    s += gid.terminal;
    return s;
}

inline std::string rfc3339_utc(std::time_t t) {
    std::tm tm{};
#if defined(_WIN32)
    gmtime_s(&tm, &t);
#else
    gmtime_r(&t, &tm);
#endif
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

/// Seeded runs must reproduce byte-identical registries, so the timestamp is
/// derived from the seed instead of the wall clock.
inline std::string creation_timestamp(const std::optional<std::uint64_t>& seed) {
    if (seed) {
        const std::time_t base = 1577836800; // 2020-01-01T00:00:00Z
        return rfc3339_utc(base + static_cast<std::time_t>(*seed % 315360000ULL));
    }
    return rfc3339_utc(std::time(nullptr));
}

inline ghost_identifier make_identifier(const wordlist& wl, std::string owner_id, std::size_t q,
                                        rng& r, std::optional<std::string> prefix = std::nullopt,
                                        std::string terminal = ".",
                                        std::optional<std::uint64_t> seed = std::nullopt) {
    ghost_identifier gid;
    gid.owner_id = std::move(owner_id);
    gid.words = generate_passphrase(wl, q, r);
    gid.wordlist_digest = wl.digest();
    gid.prefix = std::move(prefix);
    gid.terminal = std::move(terminal);
    gid.created_at = creation_timestamp(seed);
    fnv1a64 h;
    h.update(gid.owner_id);
    h.update("\n");
    h.update(digest_words(gid.words));
    gid.id = "g-" + h.hex();
    return gid;
}

class registry {
public:
    /// Rejects any identifier whose word sequence is already registered,
    /// regardless of owner: the scheme relies on every passphrase being
    /// globally unique.
    void put(ghost_identifier gid) {
        std::string wkey = digest_words(gid.words);
        if (words_seen_.count(wkey))
            fail(errc::duplicate_passphrase, "word sequence already registered");
        if (by_id_.count(gid.id))
            fail(errc::invalid_argument, "duplicate identifier id " + gid.id);
        words_seen_.insert(wkey);
        by_id_.emplace(gid.id, items_.size());
        items_.push_back(std::move(gid));
    }

    const ghost_identifier& get(const std::string& id) const {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) fail(errc::unknown_id, "no identifier " + id);
        return items_[it->second];
    }

    bool contains(const std::string& id) const { return by_id_.count(id) != 0; }

    std::vector<const ghost_identifier*> list(const std::string& owner_id) const {
        std::vector<const ghost_identifier*> out;
        for (const auto& gid : items_)
            if (gid.owner_id == owner_id) out.push_back(&gid);
        return out;
    }

    const std::vector<ghost_identifier>& all() const { return items_; }
    std::size_t size() const { return items_.size(); }

    void save(std::ostream& out) const {
        for (const auto& gid : items_) {
            nlohmann::ordered_json j;
            j["id"] = gid.id;
            j["owner_id"] = gid.owner_id;
            j["words"] = gid.words;
            j["wordlist_digest"] = gid.wordlist_digest;
            j["prefix"] = gid.prefix ? nlohmann::ordered_json(*gid.prefix) : nlohmann::ordered_json(nullptr);
            j["terminal"] = gid.terminal;
            j["created_at"] = gid.created_at;
            out << j.dump() << '\n';
        }
    }

    static registry load(std::istream& in) {
        registry reg;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                fail(errc::io_error, "registry line " + std::to_string(line_no) + ": " + e.what());
            }
            ghost_identifier gid;
            try {
                gid.id = j.at("id").get<std::string>();
                gid.owner_id = j.at("owner_id").get<std::string>();
                gid.words = j.at("words").get<std::vector<std::string>>();
                gid.wordlist_digest = j.at("wordlist_digest").get<std::string>();
                if (j.contains("prefix") && !j["prefix"].is_null())
                    gid.prefix = j["prefix"].get<std::string>();
                gid.terminal = j.at("terminal").get<std::string>();
                gid.created_at = j.at("created_at").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                fail(errc::io_error, "registry line " + std::to_string(line_no) + ": " + e.what());
            }
            reg.put(std::move(gid));
        }
        return reg;
    }

    static registry load_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) fail(errc::io_error, "cannot open registry file " + path);
        return load(in);
    }

    void save_file(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) fail(errc::io_error, "cannot open registry file for writing " + path);
        save(out);
    }

private:
    std::vector<ghost_identifier> items_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_set<std::string> words_seen_;
};

} // namespace ghostmark
