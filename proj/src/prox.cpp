#include "proxcert/prox.hpp"

#include <cmath>
#include <string>

#include "proxcert/errors.hpp"

namespace proxcert {

Vector soft_threshold(const Vector& z, double theta) {
  if (!(theta >= 0.0)) throw InvalidArgument("soft_threshold: theta must be >= 0");
  Vector out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double shrunk = std::abs(z(i)) - theta;
    out(i) = shrunk > 0.0 ? std::copysign(shrunk, z(i)) : 0.0;
  }
  return out;
}

NonsmoothOracle l1_norm(double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("l1 weight must be >= 0");
  NonsmoothOracle g;
  g.value = [lambda](const Vector& x) { return lambda * x.lpNorm<1>(); };
  g.prox = [lambda](const Vector& z, double theta) { return soft_threshold(z, lambda * theta); };
  return g;
}

NonsmoothOracle zero_function() {
  NonsmoothOracle g;
  g.value = [](const Vector&) { return 0.0; };
  g.prox = [](const Vector& z, double) { return z; };
  return g;
}

Vector prox_point(const CompositeProblem& problem, const Vector& x, double s) {
  if (!(s > 0.0)) throw InvalidArgument("prox step must be > 0");
  problem.require_dimension(x);
  const Vector forward = x - s * problem.smooth().gradient(x);
  return problem.nonsmooth().prox(forward, s);
}

ProxEvaluation prox_subgradient(const CompositeProblem& problem, const Vector& x, double s) {
  ProxEvaluation e;
  e.input_point = x;
  e.step = s;
  e.mapped_point = prox_point(problem, x, s);
  e.subgradient = (x - e.mapped_point) / s;
  return e;
}

}  // namespace proxcert
