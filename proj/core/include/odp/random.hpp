#pragma once

#include <cstdint>
#include <random>

namespace odp {

// All sampling goes through this engine so traces are reproducible.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
/// Unlike std::uniform_real_distribution the result does not depend on the
/// standard library implementation.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// splitmix64 finalizer; used to derive independent per-cell seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for experiment cell `index` of a run seeded with `seed`:
/// splitmix64(seed XOR index).
inline std::uint64_t derive_cell_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ index);
}

}  // namespace odp
