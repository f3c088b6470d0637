#pragma once

#include <cstdint>
#include <random>

#include "zakmul/types.hpp"

namespace zakmul {

enum class StreamPurpose : std::uint64_t { channel = 1, bits = 2, noise = 3, leakage = 4, misc = 5 };

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Substream seed: splitmix64 folded over (master, user, trial, purpose). Draws depend only on
// this tuple, never on thread scheduling.
inline std::uint64_t substream_seed(std::uint64_t master, int user, std::uint64_t trial,
                                    StreamPurpose purpose) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(user));
    h = splitmix64(h ^ trial);
    return splitmix64(h ^ static_cast<std::uint64_t>(purpose));
}

using Rng = std::mt19937_64;

// Circularly symmetric complex Gaussian with E|z|^2 = variance.
inline cplx complex_normal(Rng& g, double variance = 1.0) {
    std::normal_distribution<double> d(0.0, std::sqrt(0.5 * variance));
    const double re = d(g);
    const double im = d(g);
    return {re, im};
}

}  // namespace zakmul
