#pragma once

#include <cstdint>
#include <cmath>

namespace zlab {

// Counter-based random numbers: every draw is a pure function of a key,
// so streams are reproducible, restartable, and safe to evaluate from any
// number of workers in any order.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One 64-bit word addressed by (seed, a, b, c, d).
inline std::uint64_t word(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c, std::uint64_t d) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  h = mix64(h ^ d);
  return h;
}

// Uniform draw in (0, 1].
inline double uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                      std::uint64_t c, std::uint64_t d) {
  return static_cast<double>((word(seed, a, b, c, d) >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller; the key (seed,a,b,c) owns two sub-draws.
inline double normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                     std::uint64_t c) {
  const double u1 = uniform(seed, a, b, c, 0);
  const double u2 = uniform(seed, a, b, c, 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace rng
}  // namespace zlab
