#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace bbc {

/// Seeded generator with portable derived distributions.
///
/// std::uniform_int_distribution and friends are implementation-defined, so
/// reports would differ between standard libraries. Everything here is built
/// directly on the 64-bit Mersenne Twister output, which is fully specified.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, bound). bound must be > 0.
    std::uint64_t uniform_index(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % bound;
    }

    /// Uniform in [0, 1).
    double uniform_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool coin() { return (engine_() >> 63) != 0; }

    /// Box-Muller; one variate per call.
    double normal(double mean, double stddev) {
        double u1;
        do {
            u1 = uniform_real();
        } while (u1 <= 0.0);
        const double u2 = uniform_real();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

   private:
    std::mt19937_64 engine_;
};

}  // namespace bbc
