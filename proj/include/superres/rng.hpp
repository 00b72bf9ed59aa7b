// Counter-based seed derivation. Every task (shot batch, sweep cell, repeat)
// gets its own stream derived from the root seed, so scheduling order and
// thread count never change the sampled numbers.
#ifndef SUPERRES_RNG_HPP
#define SUPERRES_RNG_HPP

#include <cstdint>
#include <random>

namespace superres {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream,
                                 std::uint64_t counter = 0) {
  return splitmix64(splitmix64(root ^ 0x243f6a8885a308d3ULL * stream) ^
                    0x13198a2e03707344ULL * counter);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t root, std::uint64_t stream,
                    std::uint64_t counter = 0) {
  return Rng(derive_seed(root, stream, counter));
}

}  // namespace superres

#endif
