#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "statetrace/errors.hpp"

namespace statetrace {

namespace detail {

// splitmix64 finalizer; used to derive independent seeds from (seed, stream).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic random source. The generator is std::mt19937_64 (the
/// algorithm is fixed by the standard), and every mapping below is spelled
/// out here rather than delegated to std::*_distribution, whose output is
/// implementation-defined:
///   - uniform():     next_u64() >> 11, scaled by 2^-53 -> [0, 1)
///   - uniform_int(): rejection sampling on the high bits (unbiased)
///   - normal():      Box-Muller on two uniforms, cosine branch first,
///                    sine branch cached for the next call
/// Identical seed therefore reproduces the identical draw sequence.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], both inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        detail::require(lo <= hi, "uniform_int: empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) {  // full 64-bit range
            return static_cast<std::int64_t>(next_u64());
        }
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t draw;
        do {
            draw = next_u64();
        } while (draw >= limit);
        return lo + static_cast<std::int64_t>(draw % span);
    }

    /// Standard normal deviate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Independent source for a named substream. Derivation uses only the
    /// original seed, never the draw position, so parallel and serial
    /// consumers agree.
    RandomSource derive(std::uint64_t stream) const {
        return RandomSource(detail::splitmix64(seed_ ^ detail::splitmix64(stream)));
    }

private:
    std::uint64_t seed_ = 0;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace statetrace
