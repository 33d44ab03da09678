#include "proxcert/random.hpp"

#include <cmath>
#include <numbers>

namespace proxcert {

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector Rng::normal_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Vector Rng::uniform_vector(Index n, double lo, double hi) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
  return v;
}

Matrix Rng::normal_matrix(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = normal();
  }
  return m;
}

}  // namespace proxcert
