#pragma once

#include <cstdint>
#include <random>

namespace chokefit {

/// Every random stream is keyed by (top-level seed, index, purpose), so runs
/// are reproducible and streams for different purposes never overlap.
enum class StreamPurpose : std::uint64_t {
  synthetic_train = 1,
  synthetic_test = 2,
  physical_init = 3,
  network_init = 4,
  shuffle = 5,
  search = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ index);
  return splitmix64(h ^ static_cast<std::uint64_t>(purpose));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose) {
  return std::mt19937_64(derive_seed(seed, index, purpose));
}

}  // namespace chokefit
