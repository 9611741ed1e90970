#pragma once

#include <cstdint>
#include <random>

namespace n00n {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of sub-stream `stream` of a master seed: mix64(seed + (stream + 1) * golden).
/// Every replica, phase and training derives its generator this way, so a
/// result never depends on the order in which independent work is executed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(derive_seed(seed, stream));
}

/// Poisson draw that accepts a zero mean (std::poisson_distribution does not).
inline std::int64_t poisson(Rng& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

}  // namespace n00n
