#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "proxcert/problem.hpp"

namespace proxcert {

// The ill-conditioned test problem: 500 x 500 tridiagonal A with 2 on the
// diagonal and 1 on the off-diagonals, b = all ones, lambda = 1e-6, s = 0.05.
inline constexpr Index kPaperDimension = 500;
inline constexpr double kPaperDiagonal = 2.0;
inline constexpr double kPaperOffDiagonal = 1.0;
inline constexpr double kPaperLambda = 1e-6;
inline constexpr double kPaperStep = 0.05;

struct PaperInstance {
  CompositeProblem problem;
  double step;
  std::string provenance;
};

PaperInstance build_paper_instance();

/// Lasso over the constant-diagonal tridiagonal operator, b filled with
/// `b_fill`; mu and L come from tridiagonal_spectrum.
CompositeProblem build_tridiagonal_instance(Index n, double diag, double offdiag, double b_fill,
                                            double lambda);

/// Lasso with A = U diag(sigma) V^T, where U (m x d, orthonormal columns) and
/// V (d x d, orthogonal) are Haar-distributed factors drawn from the seeded
/// generator, and sigma_i = sqrt(mu) + (sqrt(L) - sqrt(mu)) i / (d - 1).
/// The spectrum of A^T A is therefore exactly [mu, L] up to rounding.
/// b is standard normal, drawn after the factors.
CompositeProblem build_random_lasso(Index m, Index d, double mu_target, double lipschitz_target,
                                    std::uint64_t seed, double lambda);

/// Instance files: JSON with an "operator" object (tridiagonal descriptor or
/// dense "rows"), "b", "lambda", "mu" and "L". Missing mu/L are computed.
std::string serialize_instance(const CompositeProblem& problem);
CompositeProblem parse_instance(std::string_view json_text);
void save_instance(const CompositeProblem& problem, const std::filesystem::path& path);
CompositeProblem load_instance(const std::filesystem::path& path);

/// A JSON array of numbers.
Vector load_vector(const std::filesystem::path& path);

}  // namespace proxcert
