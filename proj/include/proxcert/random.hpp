#pragma once

#include <cstdint>
#include <random>

#include "proxcert/linear_operator.hpp"

namespace proxcert {

/// Seeded generator with a fully specified output sequence.
///
/// Raw bits come from std::mt19937_64, whose sequence is fixed by the C++
/// standard. The distributions are done by hand because the standard library
/// distributions are implementation-defined:
///   uniform01: (next() >> 11) * 2^-53, in [0, 1)
///   normal:    Box-Muller on two uniforms, u1 mapped to (0, 1] as 1 - u,
///              returning sqrt(-2 ln u1) cos(2 pi u2); the sine branch is
///              discarded so every normal costs exactly two raw draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double normal();

  Vector normal_vector(Index n);
  Vector uniform_vector(Index n, double lo, double hi);
  // Column-major fill.
  Matrix normal_matrix(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
};

}  // namespace proxcert
