#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ghostmark/errors.hpp"

namespace ghostmark {

/// Incremental 64-bit FNV-1a. Used for content digests (wordlists, plans,
/// input manifests) where we need a stable, portable fingerprint, not a
/// cryptographic commitment.
class fnv1a64 {
public:
    void update(std::string_view bytes) {
        for (unsigned char b : bytes) {
            state_ ^= b;
            state_ *= 0x100000001b3ull;
        }
    }

    std::uint64_t value() const noexcept { return state_; }

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out(16, '0');
        std::uint64_t v = state_;
        for (int i = 15; i >= 0; --i) {
            out[static_cast<std::size_t>(i)] = digits[v & 0xf];
            v >>= 4;
        }
        return out;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ull;
};

inline std::uint64_t hash_bytes(std::string_view bytes) {
    fnv1a64 h;
    h.update(bytes);
    return h.value();
}

inline std::string digest_bytes(std::string_view bytes) {
    fnv1a64 h;
    h.update(bytes);
    return h.hex();
}

/// Digest of a word sequence: each word followed by a newline separator, so
/// ["a","b"] and ["ab"] never collide structurally.
inline std::string digest_words(const std::vector<std::string>& words) {
    fnv1a64 h;
    for (const auto& w : words) {
        h.update(w);
        h.update("\n");
    }
    return h.hex();
}

inline std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open file for digest: " + path);
    fnv1a64 h;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        h.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
        if (!in) break;
    }
    return h.hex();
}

} // namespace ghostmark
