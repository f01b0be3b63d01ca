#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ghostmark {

inline bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_ascii_space(s[b])) ++b;
    while (e > b && is_ascii_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

/// A word is a maximal run of non-whitespace bytes. Multi-byte UTF-8
/// sequences never contain ASCII whitespace bytes, so byte-wise splitting is
/// safe on UTF-8 input.
struct word_span {
    std::size_t begin;
    std::size_t end; // one past the last byte
};

inline std::vector<word_span> word_spans(std::string_view text) {
    std::vector<word_span> spans;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && is_ascii_space(text[i])) ++i;
        if (i >= n) break;
        std::size_t b = i;
        while (i < n && !is_ascii_space(text[i])) ++i;
        spans.push_back({b, i});
    }
    return spans;
}

inline std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> out;
    for (auto s : word_spans(text)) out.emplace_back(text.substr(s.begin, s.end - s.begin));
    return out;
}

inline std::size_t count_words(std::string_view text) {
    return word_spans(text).size();
}

inline bool is_ascii_alnum(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

/// Canonical form used when comparing generated words against passphrase
/// words: lowercase ASCII, leading/trailing ASCII punctuation stripped.
/// Bytes outside ASCII are kept verbatim (inputs are assumed NFC-normalized).
/// Idempotent: normalize(normalize(w)) == normalize(w).
inline std::string normalize_token(std::string_view raw) {
    std::size_t b = 0, e = raw.size();
    auto strippable = [](char c) {
        unsigned char u = static_cast<unsigned char>(c);
        return u < 0x80 && !is_ascii_alnum(c);
    };
    while (b < e && strippable(raw[b])) ++b;
    while (e > b && strippable(raw[e - 1])) --e;
    return to_lower_ascii(raw.substr(b, e - b));
}

} // namespace ghostmark
