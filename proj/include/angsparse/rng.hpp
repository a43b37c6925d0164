#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "angsparse/types.hpp"

namespace angsparse {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for a sub-stream: folds each index into the base with
// s <- mix64(s ^ index), starting from s = mix64(base). Results depend only on
// the indices, never on scheduling.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> indices) {
  std::uint64_t s = mix64(base);
  for (auto index : indices) s = mix64(s ^ index);
  return s;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

// Real field: i.i.d. N(0,1) entries. Complex field: circularly symmetric with
// unit total variance (real and imaginary parts N(0, 1/2)) unless
// `per_component_unit` is set, in which case each part is N(0,1).
CVector gaussian_vector(Eigen::Index size, Field field, Rng& rng,
                        bool per_component_unit = false);
CMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Field field, Rng& rng);

// Uniform point on the unit sphere of R^size or C^size.
CVector uniform_sphere(Eigen::Index size, Field field, Rng& rng);

}  // namespace angsparse
