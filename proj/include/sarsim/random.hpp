#pragma once

#include <cstdint>
#include <random>

namespace sarsim {

using Rng = std::mt19937_64;

// Independent random streams. Every consumer draws from its own purpose tag so that,
// e.g., adding a comparator draw never shifts the sampling-noise sequence.
enum class Stream : std::uint64_t {
  track_and_hold = 1,
  comparator = 2,
  mismatch = 3,
  metastability = 4,
  stimulus = 5,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic generator for (seed, stream, index). The same triple always yields the
// same sequence, independent of how work is split across threads.
inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ index);
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

inline double gaussian(Rng& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  std::normal_distribution<double> dist(0.0, sigma);
  return dist(rng);
}

}  // namespace sarsim
