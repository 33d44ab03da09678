#pragma once

#include "proxcert/problem.hpp"

namespace proxcert {

/// Componentwise shrinkage out_i = (|z_i| - theta)_+ sgn(z_i).
Vector soft_threshold(const Vector& z, double theta);

/// Built-in nonsmooth parts: lambda |x|_1 and g == 0.
NonsmoothOracle l1_norm(double lambda);
NonsmoothOracle zero_function();

/// One evaluation of the s-proximal operator at a point.
struct ProxEvaluation {
  Vector input_point;
  double step = 0.0;
  Vector mapped_point;  // P_s(x)
  Vector subgradient;   // G_s(x) = (x - P_s(x)) / s
};

/// P_s(x) = prox_{s g}(x - s grad f(x)).
Vector prox_point(const CompositeProblem& problem, const Vector& x, double s);

ProxEvaluation prox_subgradient(const CompositeProblem& problem, const Vector& x, double s);

}  // namespace proxcert
