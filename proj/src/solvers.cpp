#include "proxcert/solvers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "proxcert/errors.hpp"
#include "proxcert/prox.hpp"

namespace proxcert {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::ista: return "ista";
    case Method::fista_momentum: return "fista_momentum";
    case Method::fista_phase_space: return "fista_phase_space";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "ista") return Method::ista;
  if (name == "fista_momentum" || name == "fista") return Method::fista_momentum;
  if (name == "fista_phase_space" || name == "fista-phase") return Method::fista_phase_space;
  return std::nullopt;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::tolerance: return "tolerance";
    case Termination::max_iters: return "max_iters";
    case Termination::diverged: return "diverged";
  }
  return "unknown";
}

std::optional<Termination> parse_termination(std::string_view name) {
  if (name == "tolerance") return Termination::tolerance;
  if (name == "max_iters") return Termination::max_iters;
  if (name == "diverged") return Termination::diverged;
  return std::nullopt;
}

void StoppingRule::validate() const {
  if (max_iters < 1) throw InvalidArgument("stopping rule: max_iters must be >= 1");
  if (!(grad_tol >= 0.0)) throw InvalidArgument("stopping rule: grad_tol must be >= 0");
}

namespace {

SolverTrace start_trace(Method method, const CompositeProblem& problem, const Vector& x0,
                        double s, const StoppingRule& stop) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("step size must be finite and > 0");
  stop.validate();
  problem.require_dimension(x0);

  SolverTrace trace;
  trace.method = method;
  trace.stop = stop;
  trace.problem.mu = problem.mu();
  trace.problem.lipschitz = problem.lipschitz();
  trace.problem.step = s;
  trace.problem.lambda = problem.lasso() ? problem.lasso()->lambda : 0.0;
  trace.problem.dimension = problem.dimension();
  trace.step_exceeds_inverse_lipschitz = s > 1.0 / problem.lipschitz();
  trace.momentum_degenerate = method != Method::ista && problem.mu() == 0.0;
  const std::size_t reserve = stop.max_iters < 100000 ? stop.max_iters + 1 : 100001;
  trace.records.reserve(reserve);
  return trace;
}

// Evaluates G_s(y) and P_s(y) with one gradient and one prox call.
struct Step {
  Vector mapped;
  double gs_norm_sq;
};

Step prox_step(const CompositeProblem& problem, const Vector& y, double s) {
  Step st;
  st.mapped = prox_point(problem, y, s);
  st.gs_norm_sq = ((y - st.mapped) / s).squaredNorm();
  return st;
}

// Returns true when the loop must stop after recording index k.
bool should_stop(SolverTrace& trace, std::size_t k, double gs_norm_sq) {
  if (!std::isfinite(gs_norm_sq)) {
    trace.terminated_by = Termination::diverged;
    return true;
  }
  if (trace.stop.grad_tol > 0.0 && gs_norm_sq <= trace.stop.grad_tol) {
    trace.terminated_by = Termination::tolerance;
    return true;
  }
  if (k >= trace.stop.max_iters) {
    trace.terminated_by = Termination::max_iters;
    return true;
  }
  return false;
}

void push_record(SolverTrace& trace, const RecordOptions& options, std::size_t k, const Vector& y,
                 const Vector& x, const std::optional<Vector>& v, double gs_norm_sq) {
  IterateRecord r;
  r.k = k;
  r.gs_norm_sq = gs_norm_sq;
  r.step = trace.problem.step;
  if (options.keep_iterates || k == 0) {
    r.y = y;
    r.x = x;
    r.v = v;
  }
  trace.records.push_back(std::move(r));
}

// Without kept iterates the last record still gets its vectors.
void finish(SolverTrace& trace, const RecordOptions& options, const Vector& y, const Vector& x,
            const std::optional<Vector>& v) {
  if (options.keep_iterates) return;
  IterateRecord& last = trace.records.back();
  last.y = y;
  last.x = x;
  last.v = v;
}

}  // namespace

SolverTrace ista(const CompositeProblem& problem, const Vector& x0, double s,
                 const StoppingRule& stop, RecordOptions options) {
  SolverTrace trace = start_trace(Method::ista, problem, x0, s, stop);
  Vector y = x0;
  for (std::size_t k = 0;; ++k) {
    Step st = prox_step(problem, y, s);
    push_record(trace, options, k, y, y, std::nullopt, st.gs_norm_sq);
    if (should_stop(trace, k, st.gs_norm_sq)) break;
    y = std::move(st.mapped);
  }
  finish(trace, options, y, y, std::nullopt);
  return trace;
}

SolverTrace fista_momentum(const CompositeProblem& problem, const Vector& x0, double s,
                           const StoppingRule& stop, RecordOptions options) {
  SolverTrace trace = start_trace(Method::fista_momentum, problem, x0, s, stop);
  const double coefficient = 1.0 / (1.0 + 2.0 * std::sqrt(problem.mu() * s));
  Vector x = x0;
  Vector y = x0;
  for (std::size_t k = 0;; ++k) {
    Step st = prox_step(problem, y, s);
    push_record(trace, options, k, y, x, std::nullopt, st.gs_norm_sq);
    if (should_stop(trace, k, st.gs_norm_sq)) break;
    y = st.mapped + coefficient * (st.mapped - x);
    x = std::move(st.mapped);
  }
  finish(trace, options, y, x, std::nullopt);
  return trace;
}

SolverTrace fista_phase_space(const CompositeProblem& problem, const Vector& x0, double s,
                              const StoppingRule& stop, RecordOptions options) {
  SolverTrace trace = start_trace(Method::fista_phase_space, problem, x0, s, stop);
  const double root_s = std::sqrt(s);
  const double root_mu_s = std::sqrt(problem.mu() * s);
  const double damping = 1.0 + 2.0 * root_mu_s;
  Vector x = x0;
  Vector v = Vector::Zero(x0.size());
  Vector y;
  for (std::size_t k = 0;; ++k) {
    y = x + (root_s / damping) * v;
    Step st = prox_step(problem, y, s);
    push_record(trace, options, k, y, x, v, st.gs_norm_sq);
    if (should_stop(trace, k, st.gs_norm_sq)) break;
    const Vector g = (y - st.mapped) / s;
    const Vector v_next = v - (2.0 * root_mu_s / damping) * v - root_s * g;
    Vector x_next = x + root_s * v_next;
    v = (x_next - x) / root_s;
    x = std::move(x_next);
  }
  finish(trace, options, y, x, v);
  return trace;
}

SolverTrace solve(Method method, const CompositeProblem& problem, const Vector& x0, double s,
                  const StoppingRule& stop, RecordOptions options) {
  switch (method) {
    case Method::ista: return ista(problem, x0, s, stop, options);
    case Method::fista_momentum: return fista_momentum(problem, x0, s, stop, options);
    case Method::fista_phase_space: return fista_phase_space(problem, x0, s, stop, options);
  }
  throw InvalidArgument("unknown method");
}

ReferenceSolution reference_solution(const CompositeProblem& problem, double tol,
                                     std::size_t max_iters) {
  if (!(tol > 0.0)) throw InvalidArgument("reference_solution: tol must be > 0");
  if (max_iters < 1) throw InvalidArgument("reference_solution: max_iters must be >= 1");

  const double s = kReferenceStepFraction / problem.lipschitz();
  const double coefficient = 1.0 / (1.0 + 2.0 * std::sqrt(problem.mu() * s));
  const Vector x0 = Vector::Zero(problem.dimension());

  ReferenceSolution ref;
  ref.step = s;

  Vector x = x0;
  Vector y = x0;
  Vector best_y = y;
  double best_norm = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  for (; k < max_iters; ++k) {
    Vector p = prox_point(problem, y, s);
    const double gnorm = ((y - p) / s).norm();
    if (!std::isfinite(gnorm)) break;
    if (gnorm < best_norm) {
      best_norm = gnorm;
      best_y = y;
    }
    if (gnorm <= tol) {
      const Vector candidate = p;
      const double residual = ((candidate - prox_point(problem, candidate, s)) / s).norm();
      if (residual <= tol) {
        ref.converged = true;
        best_y = y;
        best_norm = gnorm;
        break;
      }
    }
    y = p + coefficient * (p - x);
    x = std::move(p);
  }

  ref.iterations = k;
  ref.x = prox_point(problem, best_y, s);
  ref.phi = problem.objective(ref.x);
  ref.residual = ((ref.x - prox_point(problem, ref.x, s)) / s).norm();
  if (problem.mu() > 0.0) {
    // For a prox point x = P_s(y): Phi(x) - Phi* <= |G_s(y)|^2 / (2 mu),
    // and for any point z: |z - x*| <= 2 |G_s(z)| / mu.
    ref.gap_bound = best_norm * best_norm / (2.0 * problem.mu());
    ref.distance_bound = 2.0 * ref.residual / problem.mu();
  }
  return ref;
}

}  // namespace proxcert
