#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace metacog {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for replicate `index` of a run seeded with `seed`. Independent of
/// scheduling, so parallel and serial runs draw identical streams.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Multinomial draw of `n` trials over `probs` (need not be normalized).
std::vector<std::int64_t> sample_multinomial(Rng& rng, std::int64_t n, std::span<const double> probs);

}  // namespace metacog
