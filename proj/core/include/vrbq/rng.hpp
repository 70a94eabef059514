#pragma once

#include <cstdint>
#include <random>

namespace vrbq {

// SplitMix64 step. Used to derive independent seed streams (layer, episodes,
// agent, replay) from one experiment seed so that no component's draws can
// perturb another's.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream));
}

using Rng = std::mt19937_64;

// Uniform double in [0,1) from the top 53 bits. Hand-rolled instead of
// std::uniform_real_distribution so the draw sequence is identical across
// standard library implementations.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
    return lo + uniform01(rng) * (hi - lo);
}

// Uniform integer in [0, n). n must be >= 1.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

}  // namespace vrbq
