#ifndef BBAL_RNG_HPP
#define BBAL_RNG_HPP

#include <cstdint>
#include <random>

namespace bbal {

using Rng = std::mt19937_64;

// splitmix64 step; used to whiten seeds and derive independent substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic child seed from a base seed and up to three stream indices.
// Substreams derived this way are stable under any evaluation order, which is
// what makes multi-threaded grid/greedy evaluation reproducible.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s ^= a + 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  s ^= b + 0xd1b54a32d192ed03ULL;
  h ^= splitmix64(s);
  s ^= c + 0x8cb92ba72f3d8dd7ULL;
  h ^= splitmix64(s);
  return h;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace bbal

#endif  // BBAL_RNG_HPP
