#include "proxcert/problem.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "proxcert/errors.hpp"
#include "proxcert/prox.hpp"
#include "proxcert/random.hpp"

namespace proxcert {

namespace {

constexpr Index kDenseSpectrumLimit = 1000;

// diag + 2 offdiag cos(theta) without cancellation when diag ~ 2 |offdiag|:
// the cancelling part is rewritten through 1 - |cos| = 2 sin^2(phi / 2).
double tridiagonal_eigenvalue(double diag, double offdiag, double theta) {
  const double c = std::cos(theta);
  const double magnitude = 2.0 * std::abs(offdiag);
  if (std::signbit(offdiag) == std::signbit(c) || c == 0.0) {
    return diag + magnitude * std::abs(c);
  }
  const double phi = c > 0.0 ? theta : std::numbers::pi - theta;
  const double half = std::sin(0.5 * phi);
  return (diag - magnitude) + magnitude * 2.0 * half * half;
}

}  // namespace

CompositeProblem::CompositeProblem(SmoothOracle smooth, NonsmoothOracle nonsmooth,
                                   Index dimension, std::optional<LassoData> lasso)
    : smooth_(std::move(smooth)),
      nonsmooth_(std::move(nonsmooth)),
      dimension_(dimension),
      lasso_(std::move(lasso)) {
  if (dimension_ < 1) throw InvalidArgument("problem dimension must be >= 1");
  if (!smooth_.value || !smooth_.gradient || !nonsmooth_.value || !nonsmooth_.prox) {
    throw InvalidArgument("every oracle callable must be set");
  }
  if (!(smooth_.mu >= 0.0) || !(smooth_.lipschitz > 0.0) || smooth_.mu > smooth_.lipschitz) {
    throw InvalidArgument("need 0 <= mu <= L and L > 0");
  }
}

double CompositeProblem::objective(const Vector& x) const {
  require_dimension(x);
  return smooth_.value(x) + nonsmooth_.value(x);
}

void CompositeProblem::require_dimension(const Vector& x) const {
  if (x.size() != dimension_) {
    throw ShapeError("point has length " + std::to_string(x.size()) + ", problem dimension is " +
                     std::to_string(dimension_));
  }
}

CompositeProblem make_lasso(LinearOperator a, Vector b, double lambda, double mu,
                            double lipschitz) {
  if (a.rows() != b.size()) {
    throw ShapeError("lasso: A has " + std::to_string(a.rows()) + " rows but b has length " +
                     std::to_string(b.size()));
  }
  if (!(lambda >= 0.0)) throw InvalidArgument("lasso: lambda must be >= 0");

  LassoData data{a, b, lambda};
  SmoothOracle f;
  f.value = [a, b](const Vector& x) {
    const Vector r = a.apply(x) - b;
    return 0.5 * r.squaredNorm();
  };
  f.gradient = [a, b](const Vector& x) { return a.apply_transpose(a.apply(x) - b); };
  f.mu = mu;
  f.lipschitz = lipschitz;
  const Index d = a.cols();
  return CompositeProblem(std::move(f), l1_norm(lambda), d, std::move(data));
}

Spectrum tridiagonal_spectrum(Index n, double diag, double offdiag) {
  if (n < 1) throw InvalidArgument("tridiagonal_spectrum: n must be >= 1");
  Spectrum out{std::numeric_limits<double>::infinity(), 0.0};
  const double h = std::numbers::pi / static_cast<double>(n + 1);
  for (Index j = 1; j <= n; ++j) {
    const double sigma = tridiagonal_eigenvalue(diag, offdiag, static_cast<double>(j) * h);
    const double sq = sigma * sigma;
    out.mu = std::min(out.mu, sq);
    out.lipschitz = std::max(out.lipschitz, sq);
  }
  return out;
}

Spectrum dense_spectrum(const LinearOperator& a) {
  if (a.cols() > kDenseSpectrumLimit) {
    throw InvalidArgument("dense_spectrum: more than 1000 columns, use estimate_lipschitz");
  }
  const Matrix m = a.to_dense();
  const Matrix gram = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::numerical, "dense_spectrum: eigensolver did not converge");
  }
  const Vector& ev = solver.eigenvalues();
  return {std::max(0.0, ev.minCoeff()), ev.maxCoeff()};
}

Spectrum operator_spectrum(const LinearOperator& a) {
  if (const auto* t = a.tridiagonal()) return tridiagonal_spectrum(t->n, t->diag, t->offdiag);
  return dense_spectrum(a);
}

double estimate_lipschitz(const LinearOperator& a, int iters, double tol, std::uint64_t seed) {
  if (iters < 1) throw InvalidArgument("estimate_lipschitz: iters must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("estimate_lipschitz: tol must be > 0");

  Rng rng(seed);
  Vector v = rng.uniform_vector(a.cols(), -1.0, 1.0);
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < iters; ++it) {
    const Vector av = a.apply(v);
    const double rayleigh = av.squaredNorm();
    if (rayleigh == 0.0) return 0.0;
    const Vector w = a.apply_transpose(av);
    const double stagnation = std::abs(rayleigh - estimate);
    estimate = rayleigh;
    if (it > 0 && stagnation <= tol * rayleigh) break;
    const double wn = w.norm();
    if (wn == 0.0) break;
    v = w / wn;
  }
  return estimate;
}

std::optional<double> condition_number(double mu, double lipschitz) {
  if (!(mu >= 0.0)) throw InvalidArgument("condition_number: mu must be >= 0");
  if (mu == 0.0) return std::nullopt;
  return lipschitz / mu;
}

}  // namespace proxcert
