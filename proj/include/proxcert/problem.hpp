#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "proxcert/linear_operator.hpp"

namespace proxcert {

/// Differentiable part f of the composite objective. `mu` is the strong
/// convexity modulus and `lipschitz` the gradient Lipschitz constant L; both
/// are caller-declared metadata and are not re-derived from the callables.
struct SmoothOracle {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double mu = 0.0;
  double lipschitz = 1.0;
};

/// Convex, possibly nonsmooth part g. `prox(z, theta)` returns
/// argmin_u (1/(2 theta)) |u - z|^2 + g(u).
struct NonsmoothOracle {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&, double)> prox;
};

// Data behind a least-squares + l1 problem, kept so instances can be saved.
struct LassoData {
  LinearOperator a;
  Vector b;
  double lambda = 0.0;
};

/// Phi = f + g over R^dimension. Immutable after construction.
class CompositeProblem {
 public:
  CompositeProblem(SmoothOracle smooth, NonsmoothOracle nonsmooth, Index dimension,
                   std::optional<LassoData> lasso = std::nullopt);

  double objective(const Vector& x) const;

  const SmoothOracle& smooth() const { return smooth_; }
  const NonsmoothOracle& nonsmooth() const { return nonsmooth_; }
  Index dimension() const { return dimension_; }
  double mu() const { return smooth_.mu; }
  double lipschitz() const { return smooth_.lipschitz; }

  // Null unless the problem was built by make_lasso.
  const LassoData* lasso() const { return lasso_ ? &*lasso_ : nullptr; }

  // Throws ShapeError if x does not live in R^dimension.
  void require_dimension(const Vector& x) const;

 private:
  SmoothOracle smooth_;
  NonsmoothOracle nonsmooth_;
  Index dimension_;
  std::optional<LassoData> lasso_;
};

/// f(x) = 1/2 |Ax - b|^2, g(x) = lambda |x|_1. mu and L are taken as given.
CompositeProblem make_lasso(LinearOperator a, Vector b, double lambda, double mu, double lipschitz);

struct Spectrum {
  double mu = 0.0;
  double lipschitz = 0.0;
};

/// Extreme eigenvalues of A^T A = A^2 for the symmetric tridiagonal A with
/// constant diagonals, from the closed-form eigenvalues
/// diag + 2 offdiag cos(j pi / (n + 1)), j = 1..n.
Spectrum tridiagonal_spectrum(Index n, double diag, double offdiag);

/// Extreme eigenvalues of A^T A through a dense symmetric eigensolver.
/// Refuses operators with more than 1000 columns.
Spectrum dense_spectrum(const LinearOperator& a);

/// Closed form for tridiagonal operators, dense eigensolver otherwise.
Spectrum operator_spectrum(const LinearOperator& a);

/// Power iteration for lambda_max(A^T A). The start vector is drawn from the
/// seeded generator, so the estimate is deterministic. Returns a Rayleigh
/// quotient, hence never above the true value (up to rounding).
double estimate_lipschitz(const LinearOperator& a, int iters, double tol,
                          std::uint64_t seed = 0x5eedULL);

/// L / mu; std::nullopt when mu == 0 (infinite condition number).
std::optional<double> condition_number(double mu, double lipschitz);

}  // namespace proxcert
