#pragma once

#include <cstdint>
#include <random>

namespace hybrid {

using Rng = std::mt19937_64;

// Counter-based stream split: the generator for (seed, stream, index) does not
// depend on how many other streams were drawn before it, so parallel trials
// produce the same numbers regardless of scheduling.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0) {
    return Rng(derive_seed(seed, stream, index));
}

// Stream tags keep the uses of one master seed apart.
namespace streams {
constexpr std::uint64_t channel = 0x11;
constexpr std::uint64_t noise = 0x22;
constexpr std::uint64_t bits = 0x33;
constexpr std::uint64_t factor_init = 0x44;
constexpr std::uint64_t dataset = 0x55;
constexpr std::uint64_t weights = 0x66;
constexpr std::uint64_t batches = 0x77;
constexpr std::uint64_t noise_layer = 0x88;
} // namespace streams

} // namespace hybrid
