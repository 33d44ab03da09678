#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "proxcert/problem.hpp"

namespace proxcert {

enum class Method { ista, fista_momentum, fista_phase_space };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);

/// Stop after max_iters steps, or as soon as |G_s(y_k)|^2 <= grad_tol.
/// grad_tol = 0 turns the tolerance test off: an exact zero is not a fixed
/// point of the momentum methods, whose x_k may still be moving.
struct StoppingRule {
  std::size_t max_iters = 10000;
  double grad_tol = 0.0;

  void validate() const;
};

/// One row of a solver trace. For ISTA x == y. `v` is only set by the
/// phase-space solver. When iterates are not kept, y/x/v are empty vectors
/// except in the first and last record.
struct IterateRecord {
  std::size_t k = 0;
  Vector y;
  Vector x;
  std::optional<Vector> v;
  std::optional<double> objective_gap_x;
  double gs_norm_sq = 0.0;
  double step = 0.0;

  bool has_iterates() const { return y.size() > 0; }
};

enum class Termination { tolerance, max_iters, diverged };

std::string_view to_string(Termination t);
std::optional<Termination> parse_termination(std::string_view name);

struct ProblemMetadata {
  double mu = 0.0;
  double lipschitz = 0.0;
  double step = 0.0;
  double lambda = 0.0;  // 0 unless the problem is a lasso instance
  Index dimension = 0;
};

struct SolverTrace {
  Method method = Method::ista;
  std::vector<IterateRecord> records;
  ProblemMetadata problem;
  StoppingRule stop;
  Termination terminated_by = Termination::max_iters;
  // s > 1/L: allowed so divergence can be studied, never certified.
  bool step_exceeds_inverse_lipschitz = false;
  // mu == 0 turns the FISTA momentum coefficient into the constant 1.
  bool momentum_degenerate = false;

  bool diverged() const { return terminated_by == Termination::diverged; }
  const IterateRecord& last() const { return records.back(); }
};

struct RecordOptions {
  // Drop iterate vectors for records other than the first and the last.
  bool keep_iterates = true;
};

/// y_{k+1} = P_s(y_k).
SolverTrace ista(const CompositeProblem& problem, const Vector& x0, double s,
                 const StoppingRule& stop, RecordOptions options = {});

/// x_k = P_s(y_{k-1});  y_k = x_k + (x_k - x_{k-1}) / (1 + 2 sqrt(mu s));  y_0 = x_0.
SolverTrace fista_momentum(const CompositeProblem& problem, const Vector& x0, double s,
                           const StoppingRule& stop, RecordOptions options = {});

/// Implicit-velocity form of the same method:
///   y_k     = x_k + sqrt(s) v_k / (1 + 2 sqrt(mu s))
///   v_{k+1} = v_k - 2 sqrt(mu s) v_k / (1 + 2 sqrt(mu s)) - sqrt(s) G_s(y_k)
///   x_{k+1} = x_k + sqrt(s) v_{k+1},   v_0 = 0.
/// The stored v_{k+1} is recomputed as (x_{k+1} - x_k) / sqrt(s) so that the
/// position/velocity identity holds for the recorded values.
SolverTrace fista_phase_space(const CompositeProblem& problem, const Vector& x0, double s,
                              const StoppingRule& stop, RecordOptions options = {});

SolverTrace solve(Method method, const CompositeProblem& problem, const Vector& x0, double s,
                  const StoppingRule& stop, RecordOptions options = {});

/// High-accuracy surrogate for the minimizer, used wherever x* and Phi(x*)
/// are needed.
struct ReferenceSolution {
  Vector x;
  double phi = 0.0;
  double residual = 0.0;  // |G_s(x)| at the returned point, with s = step
  double step = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  // Valid only when mu > 0: |x - x*| <= distance_bound and
  // Phi(x) - Phi(x*) <= gap_bound.
  std::optional<double> distance_bound;
  std::optional<double> gap_bound;
};

inline constexpr double kReferenceStepFraction = 0.99;
inline constexpr std::size_t kReferenceMaxIters = 5'000'000;

/// Runs FISTA (momentum form) at s = 0.99 / L until |G_s| <= tol and
/// returns the final prox point. Not-converged runs return the best point
/// seen, flagged.
ReferenceSolution reference_solution(const CompositeProblem& problem, double tol,
                                     std::size_t max_iters = kReferenceMaxIters);

}  // namespace proxcert
