#pragma once

#include <cstdint>

namespace qkdstar {

// ============================================================================
// Splittable counter-style RNG for reproducible simulation: every trial gets
// its own substream derived from (seed, trial index), so aggregates are
// independent of evaluation order and of how trials are partitioned across
// threads.
// ============================================================================

/// SplitMix64 output mixing function.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

/// Stream seed for one trial; distinct trials give decorrelated streams.
[[nodiscard]] constexpr std::uint64_t substream_seed(std::uint64_t seed,
                                                     std::uint64_t index) {
    return mix64(seed + mix64(index + 0x9E3779B97F4A7C15ULL));
}

/// SplitMix64 stream generator.
class SplitRng {
public:
    explicit constexpr SplitRng(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    /// Uniform integer in [0, n) via the multiply-shift reduction.
    std::uint32_t uniform_int(std::uint32_t n) {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

} // namespace qkdstar
