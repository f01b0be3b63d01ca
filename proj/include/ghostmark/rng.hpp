#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>

#include "ghostmark/errors.hpp"

namespace ghostmark {

/// Randomness source with two modes:
///  - system: every draw comes from the OS entropy pool (std::random_device),
///    the production default for identifier generation;
///  - seeded: mt19937_64, fully reproducible given the seed.
///
/// Bounded draws use rejection sampling so results do not depend on the
/// standard library's distribution implementations.
class rng {
public:
    static rng seeded(std::uint64_t seed) { return rng(seed); }

    static rng system() { return rng(); }

    bool is_seeded() const noexcept { return !device_; }

    std::uint64_t next() {
        if (device_) {
            std::uint64_t hi = (*device_)();
            std::uint64_t lo = (*device_)();
            return (hi << 32) ^ lo;
        }
        return engine_();
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) fail(errc::invalid_argument, "rng.below(0)");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Box-Muller; avoids std::normal_distribution for cross-platform
    /// reproducibility of seeded streams.
    double gaussian(double mean, double sd) {
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        double u2 = uniform01();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return mean + sd * z;
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        if (items.size() < 2) return;
        for (std::size_t i = items.size() - 1; i > 0; --i) {
            std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(items[i], items[j]);
        }
    }

private:
    explicit rng(std::uint64_t seed) : engine_(seed) {}
    rng() : device_(std::make_unique<std::random_device>()) {}

    std::mt19937_64 engine_;
    std::unique_ptr<std::random_device> device_;
};

} // namespace ghostmark
