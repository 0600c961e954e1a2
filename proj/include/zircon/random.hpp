#pragma once

#include <cstdint>
#include <random>

#include "zircon/bytes.hpp"

namespace zircon {

/// All randomness in the library flows through this engine. Its output
/// sequence is fixed by the standard, so seeded runs are portable.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection; bound must be > 0.
/// std::uniform_int_distribution is implementation-defined, this is not.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % bound;
}

inline std::uint64_t uniform_between(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + uniform_below(rng, hi - lo + 1);
}

inline Bytes random_bytes(Rng& rng, std::size_t count) {
  Bytes out(count);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng() >> 56);
  return out;
}

/// Derive an independent child seed (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace zircon
