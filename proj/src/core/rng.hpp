#pragma once

#include <cstdint>
#include <random>

namespace wbesprit {

// splitmix64; used to derive well-separated substream seeds from (seed, tags).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ (a * 0x9e3779b97f4a7c15ULL));
  s = splitmix64(s ^ (b * 0xc2b2ae3d27d4eb4fULL));
  s = splitmix64(s ^ (c * 0x165667b19e3779f9ULL));
  return s;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace wbesprit
