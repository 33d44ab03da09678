#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "proxcert/problem.hpp"
#include "proxcert/solvers.hpp"

namespace proxcert {

/// Geometric upper bound evaluated at iteration k:
///   power:          constant * ratio^k
///   inverse_power:  constant / (1 + beta)^k   (ratio = 1 / (1 + beta))
struct RateEnvelope {
  enum class Form { power, inverse_power };

  double constant = 0.0;
  double ratio = 1.0;
  double beta = 0.0;
  Form form = Form::power;

  static RateEnvelope power(double constant, double ratio);
  static RateEnvelope inverse_power(double constant, double beta);

  double evaluate(std::size_t k) const;
};

/// Linear rates of ISTA for 0 < s <= 1/L with rho = (1 - mu s) / (1 + mu s):
///   Phi(y_k) - Phi*  <= (1/s) rho^k |x_0 - x*|^2
///   |G_s(y_k)|^2     <= (4/s^2) rho^k |x_0 - x*|^2
struct IstaEnvelopes {
  RateEnvelope objective;
  RateEnvelope gradient;
};

/// Throws TheoremRangeError when s > 1/L.
IstaEnvelopes ista_envelopes(double s, double mu, double lipschitz, double dist0_sq);

/// Accelerated rates for FISTA with beta = sqrt(mu s) / 4 and
/// E0 = Phi(x_0) - Phi* + mu |x_0 - x*|^2:
///   Phi(x_k) - Phi*  <= E0 / (1 + beta)^k                  (0 < s <= 1/L)
///   |G_s(y_k)|^2     <= 2 E0 / (s (1 - sL) (1 + beta)^k)   (0 < s < 1/L)
/// and the simplified forms with E0 replaced through |x_0 - x*|^2:
///   11 D / (2 s)   and   11 D / (s^2 (1 - sL)).
struct FistaEnvelopes {
  RateEnvelope objective;
  std::optional<RateEnvelope> gradient;
  RateEnvelope simplified_objective;
  std::optional<RateEnvelope> simplified_gradient;
  // s == 1/L: the gradient bounds blow up through 1 / (1 - sL).
  bool gradient_singular = false;
};

/// Throws TheoremRangeError when s > 1/L.
FistaEnvelopes fista_envelopes(double s, double mu, double lipschitz, double phi_gap0,
                               double dist0_sq);

/// A signed slack (>= 0 means the inequality holds) with the magnitude of the
/// terms that produced it, used to scale tolerances.
struct SignedSlack {
  double slack = 0.0;
  double scale = 1.0;
};

/// Strong growth around the minimizer:
///   Phi(x) - Phi(x*) - (mu/2) |x - x*|^2 >= 0,
/// with the reference point standing in for x*.
SignedSlack check_strong_gap(const CompositeProblem& problem, const Vector& x, const Vector& x_ref,
                             double phi_ref);

/// Step-scaled pivotal inequality, returned as RHS - LHS:
///   Phi(P_s(y)) <= Phi(x) + <G_s(y), y - x> - (s - s^2 L / 2) |G_s(y)|^2
///                  - (mu/2) |y - x|^2
/// `mu_override` replaces the problem's mu (0 gives the convex form).
SignedSlack check_pivotal(const CompositeProblem& problem, const Vector& x, const Vector& y,
                          double s, std::optional<double> mu_override = std::nullopt);

/// |y_k - x_ref|^2 per record. Requires an ISTA trace with kept iterates.
std::vector<double> ista_lyapunov(const SolverTrace& trace, const Vector& x_ref);

/// Phi(x_k) - Phi_ref + |v_k|^2 / (4 (1 + 2 sqrt(mu s))^2)
///   + |v_k + 2 sqrt(mu) (x_k - x_ref)|^2 / 4 per record.
/// Throws InvalidArgument for traces without velocities.
std::vector<double> fista_lyapunov(const CompositeProblem& problem, const SolverTrace& trace,
                                   const Vector& x_ref, double phi_ref);

/// Per-step contraction factor of the FISTA energy:
///   sqrt(mu s) * min{1, (1 + sqrt(mu s)) / (3/4 + sqrt(mu s) + mu s), 1/4}.
double fista_lyapunov_min_factor(double mu, double s);

struct CheckResult {
  std::string name;
  std::size_t tested = 0;
  double worst_slack = 0.0;  // raw slack where slack + tolerance is smallest
  std::size_t worst_index = 0;
  double tolerance = 0.0;    // allowance at worst_index
  bool pass = true;
};

struct CertificateReport {
  std::vector<CheckResult> checks;
  std::string tolerance_policy;
  double reference_residual = 0.0;
  bool certifiable = true;
  std::string note;

  bool passed() const;
  const CheckResult* find(const std::string& name) const;
};

/// Theorem envelopes matching a trace's method, built from its own (s, mu, L)
/// and the measured distance / gap at x_0.
struct TraceEnvelopes {
  std::optional<RateEnvelope> objective;
  std::optional<RateEnvelope> gradient;
  std::optional<RateEnvelope> simplified_objective;
  std::optional<RateEnvelope> simplified_gradient;
};

/// Empty envelopes (no throw) when the step is outside the theorem range.
TraceEnvelopes envelopes_for(const CompositeProblem& problem, const SolverTrace& trace,
                             const ReferenceSolution& ref);

inline constexpr double kRelativeTolerance = 1e-8;

/// Pointwise domination of the envelopes plus the Lyapunov decay checks
/// applicable to the trace's method. Divergent traces and traces with
/// s > 1/L come back as uncertifiable.
CertificateReport certify_trace(const CompositeProblem& problem, const SolverTrace& trace,
                                const TraceEnvelopes& envelopes, const ReferenceSolution& ref);

/// Fills IterateRecord::objective_gap_x = Phi(x_k) - phi_ref where iterates exist.
void fill_objective_gaps(const CompositeProblem& problem, SolverTrace& trace, double phi_ref);

}  // namespace proxcert
