#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bsif {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and a path of
/// indices/tags. Parallel jobs seed from (master, job index, purpose) so the
/// numbers they draw do not depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ull));
  return h;
}

// Purpose tags for derive_seed.
enum SeedTag : std::uint64_t {
  kTagPatches = 0x5041,
  kTagTraining = 0x5452,
  kTagPairs = 0x5041'4952,
  kTagBootstrap = 0x424F,
  kTagPermutation = 0x5045,
  kTagSynth = 0x5359,
};

}  // namespace bsif
