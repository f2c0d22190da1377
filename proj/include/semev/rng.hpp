#pragma once

#include <cmath>
#include <cstdint>

namespace semev {

// Counter-based 64-bit generator (SplitMix64). Substreams are derived by
// hashing (seed, stream index), so trial i draws the same values whether
// trials run serially or concurrently.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t s) : state(s) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64(mix(seed + 0x9E3779B97F4A7C15ull) ^
                          mix(index * 0xD2B74407B1CE6E93ull + 0x8BB84B93962EACC9ull));
    }

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        return mix(state);
    }

    // uniform in [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // integer in [lo, hi] inclusive
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next() % span);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller; consumes two draws, keeps no cached state
    double gaussian() {
        double u1 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }
};

}  // namespace semev
