#ifndef NETLEARN_RNG_HPP
#define NETLEARN_RNG_HPP

#include <cstdint>
#include <random>

namespace netlearn {

// splitmix64 finalizer; decorrelates structured seed material before it
// reaches a mersenne twister.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fold_seed(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(mix64(seed));
}

}  // namespace netlearn

#endif  // NETLEARN_RNG_HPP
