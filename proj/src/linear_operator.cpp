#include "proxcert/linear_operator.hpp"

#include <string>

#include "proxcert/errors.hpp"

namespace proxcert {

namespace {

Vector tridiagonal_apply(const TridiagonalKind& t, const Vector& x) {
  const Index n = t.n;
  Vector out(n);
  if (n == 1) {
    out(0) = t.diag * x(0);
    return out;
  }
  out(0) = t.diag * x(0) + t.offdiag * x(1);
  for (Index i = 1; i + 1 < n; ++i) {
    out(i) = t.diag * x(i) + t.offdiag * (x(i - 1) + x(i + 1));
  }
  out(n - 1) = t.diag * x(n - 1) + t.offdiag * x(n - 2);
  return out;
}

void require_length(const Vector& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw ShapeError(std::string(what) + ": expected length " + std::to_string(expected) +
                     ", got " + std::to_string(v.size()));
  }
}

}  // namespace

LinearOperator LinearOperator::dense(Matrix a) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw ShapeError("dense operator must have at least one row and column");
  }
  return LinearOperator(DenseKind{std::move(a)});
}

LinearOperator LinearOperator::symmetric_tridiagonal(Index n, double diag, double offdiag) {
  if (n < 1) throw InvalidArgument("tridiagonal operator needs n >= 1");
  return LinearOperator(TridiagonalKind{n, diag, offdiag});
}

LinearOperator LinearOperator::identity(Index n) { return symmetric_tridiagonal(n, 1.0, 0.0); }

Index LinearOperator::rows() const {
  if (const auto* t = tridiagonal()) return t->n;
  return std::get<DenseKind>(kind_).a.rows();
}

Index LinearOperator::cols() const {
  if (const auto* t = tridiagonal()) return t->n;
  return std::get<DenseKind>(kind_).a.cols();
}

Vector LinearOperator::apply(const Vector& x) const {
  require_length(x, cols(), "apply");
  if (const auto* t = tridiagonal()) return tridiagonal_apply(*t, x);
  return std::get<DenseKind>(kind_).a * x;
}

Vector LinearOperator::apply_transpose(const Vector& y) const {
  require_length(y, rows(), "apply_transpose");
  if (const auto* t = tridiagonal()) return tridiagonal_apply(*t, y);
  return std::get<DenseKind>(kind_).a.transpose() * y;
}

Matrix LinearOperator::to_dense() const {
  if (const auto* d = dense_matrix()) return d->a;
  const auto& t = std::get<TridiagonalKind>(kind_);
  Matrix m = Matrix::Zero(t.n, t.n);
  for (Index i = 0; i < t.n; ++i) {
    m(i, i) = t.diag;
    if (i + 1 < t.n) {
      m(i, i + 1) = t.offdiag;
      m(i + 1, i) = t.offdiag;
    }
  }
  return m;
}

}  // namespace proxcert
