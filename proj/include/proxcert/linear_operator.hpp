#pragma once

#include <Eigen/Dense>
#include <variant>

namespace proxcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

struct DenseKind {
  Matrix a;
};

// n x n matrix with a constant main diagonal and constant first off-diagonals.
struct TridiagonalKind {
  Index n = 0;
  double diag = 0.0;
  double offdiag = 0.0;
};

class LinearOperator {
 public:
  static LinearOperator dense(Matrix a);
  static LinearOperator symmetric_tridiagonal(Index n, double diag, double offdiag);
  static LinearOperator identity(Index n);

  Index rows() const;
  Index cols() const;

  Vector apply(const Vector& x) const;
  Vector apply_transpose(const Vector& y) const;

  Matrix to_dense() const;

  bool is_tridiagonal() const { return std::holds_alternative<TridiagonalKind>(kind_); }
  const TridiagonalKind* tridiagonal() const { return std::get_if<TridiagonalKind>(&kind_); }
  const DenseKind* dense_matrix() const { return std::get_if<DenseKind>(&kind_); }

 private:
  explicit LinearOperator(std::variant<DenseKind, TridiagonalKind> kind)
      : kind_(std::move(kind)) {}

  std::variant<DenseKind, TridiagonalKind> kind_;
};

}  // namespace proxcert
