#pragma once

#include <cstdint>
#include <random>

namespace c4q {

using Rng = std::mt19937_64;

// Independent per-purpose streams split from one run seed.
enum class Stream : std::uint64_t {
  Opponent = 1,
  Policy = 2,
  NetworkInit = 3,
  Shuffle = 4,
  TestOpponent = 5,
};

// splitmix64 finalizer over (seed, stream).
constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(stream) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, Stream stream) { return Rng{derive_seed(seed, stream)}; }

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace c4q
