#pragma once

#include <cstdint>
#include <random>

namespace mograsp {

/// SplitMix64 step, used to derive independent stream seeds from a root
/// seed so that parallel and serial evaluation draw identical numbers.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(root ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a,
                                 std::uint64_t b) {
  return derive_seed(derive_seed(root, a), b);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace mograsp
