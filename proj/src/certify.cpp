#include "proxcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "proxcert/errors.hpp"
#include "proxcert/prox.hpp"

namespace proxcert {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Rounding allowances for recomputed objective values and for norms of
// differences of nearly equal vectors.
constexpr double kObjectiveRounding = 1024.0 * kEps;
constexpr double kVectorRounding = 64.0 * kEps;

const char* const kTolerancePolicy =
    "pass iff slack >= -(1e-8*|bound_k| + r*(|y_k - x_ref| + 1) + fp_k); "
    "r = |G_s(x_ref)| of the reference solution; "
    "fp_k = 1024*eps*(|Phi(x_k)| + |Phi_ref| + |Phi(x_0)|) for objective and energy checks, "
    "e^2 + 2e*sqrt(value) with e = 64*eps*(|a| + |b|)/scale for squared norms of differences";

class CheckAccumulator {
 public:
  explicit CheckAccumulator(std::string name) { result_.name = std::move(name); }

  void add(std::size_t index, double slack, double tolerance) {
    ++result_.tested;
    if (saw_nan_) return;
    const double margin = slack + tolerance;
    // A NaN slack is a failure and stays the reported worst case.
    if (std::isnan(margin)) saw_nan_ = true;
    if (saw_nan_ || margin < best_margin_) {
      best_margin_ = margin;
      result_.worst_slack = slack;
      result_.worst_index = index;
      result_.tolerance = tolerance;
    }
  }

  CheckResult finish() {
    result_.pass = !saw_nan_ && best_margin_ >= 0.0;
    return result_;
  }

 private:
  CheckResult result_;
  double best_margin_ = std::numeric_limits<double>::infinity();
  bool saw_nan_ = false;
};

// Rounding allowance for |a - b|^2 computed in floating point.
double squared_difference_rounding(double norm_a, double norm_b, double diff_norm) {
  const double e = kVectorRounding * (norm_a + norm_b);
  return e * e + 2.0 * e * diff_norm;
}

}  // namespace

RateEnvelope RateEnvelope::power(double constant, double ratio) {
  if (!(constant >= 0.0)) throw InvalidArgument("envelope constant must be >= 0");
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw InvalidArgument("envelope ratio must lie in [0, 1]");
  RateEnvelope e;
  e.constant = constant;
  e.ratio = ratio;
  e.form = Form::power;
  return e;
}

RateEnvelope RateEnvelope::inverse_power(double constant, double beta) {
  if (!(constant >= 0.0)) throw InvalidArgument("envelope constant must be >= 0");
  if (!(beta >= 0.0)) throw InvalidArgument("envelope beta must be >= 0");
  RateEnvelope e;
  e.constant = constant;
  e.beta = beta;
  e.ratio = 1.0 / (1.0 + beta);
  e.form = Form::inverse_power;
  return e;
}

double RateEnvelope::evaluate(std::size_t k) const {
  const double kk = static_cast<double>(k);
  if (form == Form::power) return constant * std::pow(ratio, kk);
  return constant / std::pow(1.0 + beta, kk);
}

IstaEnvelopes ista_envelopes(double s, double mu, double lipschitz, double dist0_sq) {
  if (!(s > 0.0)) throw InvalidArgument("ista_envelopes: s must be > 0");
  if (!(mu >= 0.0 && mu <= lipschitz)) throw InvalidArgument("ista_envelopes: need 0 <= mu <= L");
  if (!(dist0_sq >= 0.0)) throw InvalidArgument("ista_envelopes: dist0_sq must be >= 0");
  if (s > 1.0 / lipschitz) throw TheoremRangeError("ISTA rates need s <= 1/L");
  const double rho = (1.0 - mu * s) / (1.0 + mu * s);
  return {RateEnvelope::power(dist0_sq / s, rho), RateEnvelope::power(4.0 * dist0_sq / (s * s), rho)};
}

FistaEnvelopes fista_envelopes(double s, double mu, double lipschitz, double phi_gap0,
                               double dist0_sq) {
  if (!(s > 0.0)) throw InvalidArgument("fista_envelopes: s must be > 0");
  if (!(mu >= 0.0 && mu <= lipschitz)) throw InvalidArgument("fista_envelopes: need 0 <= mu <= L");
  if (!(dist0_sq >= 0.0)) throw InvalidArgument("fista_envelopes: dist0_sq must be >= 0");
  if (s > 1.0 / lipschitz) throw TheoremRangeError("FISTA rates need s <= 1/L");

  const double beta = std::sqrt(mu * s) / 4.0;
  const double energy0 = std::max(0.0, phi_gap0) + mu * dist0_sq;

  FistaEnvelopes out;
  out.objective = RateEnvelope::inverse_power(energy0, beta);
  out.simplified_objective = RateEnvelope::inverse_power(11.0 * dist0_sq / (2.0 * s), beta);
  const double margin = 1.0 - s * lipschitz;
  if (!(s < 1.0 / lipschitz) || !(margin > 0.0)) {
    out.gradient_singular = true;
    return out;
  }
  out.gradient = RateEnvelope::inverse_power(2.0 * energy0 / (s * margin), beta);
  out.simplified_gradient = RateEnvelope::inverse_power(11.0 * dist0_sq / (s * s * margin), beta);
  return out;
}

SignedSlack check_strong_gap(const CompositeProblem& problem, const Vector& x, const Vector& x_ref,
                             double phi_ref) {
  const double phi = problem.objective(x);
  const double quad = 0.5 * problem.mu() * (x - x_ref).squaredNorm();
  return {phi - phi_ref - quad, 1.0 + std::abs(phi) + std::abs(phi_ref) + quad};
}

SignedSlack check_pivotal(const CompositeProblem& problem, const Vector& x, const Vector& y,
                          double s, std::optional<double> mu_override) {
  const double mu = mu_override.value_or(problem.mu());
  const double lipschitz = problem.lipschitz();
  const ProxEvaluation e = prox_subgradient(problem, y, s);
  const double lhs = problem.objective(e.mapped_point);
  const double phi_x = problem.objective(x);
  const double inner = e.subgradient.dot(y - x);
  const double descent = (s - 0.5 * s * s * lipschitz) * e.subgradient.squaredNorm();
  const double strong = 0.5 * mu * (y - x).squaredNorm();
  // rhs_convex - strong keeps the mu > 0 slack below the mu = 0 one exactly.
  const double rhs_convex = phi_x + inner - descent;
  const double rhs = rhs_convex - strong;
  const double scale =
      1.0 + std::abs(phi_x) + std::abs(lhs) + std::abs(inner) + std::abs(descent) + strong;
  return {rhs - lhs, scale};
}

std::vector<double> ista_lyapunov(const SolverTrace& trace, const Vector& x_ref) {
  if (trace.method != Method::ista) throw InvalidArgument("ista_lyapunov needs an ISTA trace");
  std::vector<double> out;
  out.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    out.push_back(r.has_iterates() ? (r.y - x_ref).squaredNorm()
                                   : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

std::vector<double> fista_lyapunov(const CompositeProblem& problem, const SolverTrace& trace,
                                   const Vector& x_ref, double phi_ref) {
  if (trace.records.empty() || !trace.records.front().v) {
    throw InvalidArgument("fista_lyapunov needs a trace with velocities (phase-space form)");
  }
  const double mu = trace.problem.mu;
  const double s = trace.problem.step;
  const double damping = 1.0 + 2.0 * std::sqrt(mu * s);
  const double root_mu = std::sqrt(mu);
  std::vector<double> out;
  out.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    if (!r.has_iterates() || !r.v) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const Vector& v = *r.v;
    const double potential = problem.objective(r.x) - phi_ref;
    const double kinetic = v.squaredNorm() / (4.0 * damping * damping);
    const double mixed = (v + 2.0 * root_mu * (r.x - x_ref)).squaredNorm() / 4.0;
    out.push_back(potential + kinetic + mixed);
  }
  return out;
}

double fista_lyapunov_min_factor(double mu, double s) {
  const double a = std::sqrt(mu * s);
  const double middle = (1.0 + a) / (0.75 + a + mu * s);
  return a * std::min({1.0, middle, 0.25});
}

bool CertificateReport::passed() const {
  if (!certifiable) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* CertificateReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

TraceEnvelopes envelopes_for(const CompositeProblem& problem, const SolverTrace& trace,
                             const ReferenceSolution& ref) {
  TraceEnvelopes out;
  const auto& meta = trace.problem;
  if (meta.step > 1.0 / meta.lipschitz || trace.records.empty()) return out;
  const IterateRecord& first = trace.records.front();
  const double dist0_sq = (first.x - ref.x).squaredNorm();
  if (trace.method == Method::ista) {
    const auto e = ista_envelopes(meta.step, meta.mu, meta.lipschitz, dist0_sq);
    out.objective = e.objective;
    out.gradient = e.gradient;
    return out;
  }
  const double phi_gap0 = problem.objective(first.x) - ref.phi;
  const auto e = fista_envelopes(meta.step, meta.mu, meta.lipschitz, phi_gap0, dist0_sq);
  out.objective = e.objective;
  out.gradient = e.gradient;
  out.simplified_objective = e.simplified_objective;
  out.simplified_gradient = e.simplified_gradient;
  return out;
}

void fill_objective_gaps(const CompositeProblem& problem, SolverTrace& trace, double phi_ref) {
  for (auto& r : trace.records) {
    if (r.has_iterates()) r.objective_gap_x = problem.objective(r.x) - phi_ref;
  }
}

CertificateReport certify_trace(const CompositeProblem& problem, const SolverTrace& trace,
                                const TraceEnvelopes& envelopes, const ReferenceSolution& ref) {
  CertificateReport report;
  report.tolerance_policy = kTolerancePolicy;
  report.reference_residual = ref.residual;

  const auto& meta = trace.problem;
  if (trace.diverged()) {
    report.certifiable = false;
    report.note = "uncertifiable: trace diverged";
    return report;
  }
  if (meta.step > 1.0 / meta.lipschitz) {
    report.certifiable = false;
    report.note = "uncertifiable: step exceeds 1/L";
    return report;
  }
  if (trace.records.empty()) {
    report.certifiable = false;
    report.note = "uncertifiable: empty trace";
    return report;
  }
  problem.require_dimension(ref.x);

  const double r = ref.residual;
  const double s = meta.step;
  const double ref_norm = ref.x.norm();
  const IterateRecord& first = trace.records.front();
  const double phi0 = problem.objective(first.x);

  // Per-record quantities; NaN where iterates were not kept.
  const std::size_t n = trace.records.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> phi_x(n, nan);
  std::vector<double> budget(n, nan);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = trace.records[i];
    if (!rec.has_iterates()) continue;
    phi_x[i] = problem.objective(rec.x);
    budget[i] = r * ((rec.y - ref.x).norm() + 1.0);
  }
  auto objective_rounding = [&](std::size_t i) {
    return kObjectiveRounding * (std::abs(phi_x[i]) + std::abs(ref.phi) + std::abs(phi0));
  };

  if (envelopes.objective || envelopes.simplified_objective) {
    auto run = [&](const RateEnvelope& env, const char* name) {
      CheckAccumulator acc(name);
      for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(phi_x[i])) continue;
        const auto& rec = trace.records[i];
        const double bound = env.evaluate(rec.k);
        const double observed = phi_x[i] - ref.phi;
        acc.add(rec.k, bound - observed,
                kRelativeTolerance * std::abs(bound) + budget[i] + objective_rounding(i));
      }
      report.checks.push_back(acc.finish());
    };
    if (envelopes.objective) run(*envelopes.objective, "objective_envelope");
    if (envelopes.simplified_objective) {
      run(*envelopes.simplified_objective, "objective_envelope_simplified");
    }
  }

  auto run_gradient = [&](const RateEnvelope& env, const char* name) {
    CheckAccumulator acc(name);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& rec = trace.records[i];
      const double bound = env.evaluate(rec.k);
      double allowance = kRelativeTolerance * std::abs(bound);
      if (rec.has_iterates()) {
        const double e = kVectorRounding * (1.0 + rec.y.norm()) / s;
        allowance += budget[i] + e * e + 2.0 * e * std::sqrt(rec.gs_norm_sq);
      } else {
        allowance += r;
      }
      acc.add(rec.k, bound - rec.gs_norm_sq, allowance);
    }
    report.checks.push_back(acc.finish());
  };
  if (envelopes.gradient) run_gradient(*envelopes.gradient, "gradient_envelope");
  if (envelopes.simplified_gradient) {
    run_gradient(*envelopes.simplified_gradient, "gradient_envelope_simplified");
  }

  if (trace.method == Method::ista && first.has_iterates()) {
    const auto energy = ista_lyapunov(trace, ref.x);
    const double rho = (1.0 - meta.mu * s) / (1.0 + meta.mu * s);
    const RateEnvelope decay = RateEnvelope::power(energy.front(), rho);
    CheckAccumulator acc("lyapunov_decay");
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isnan(energy[i])) continue;
      const auto& rec = trace.records[i];
      const double bound = decay.evaluate(rec.k);
      const double rounding =
          squared_difference_rounding(rec.y.norm(), ref_norm, std::sqrt(energy[i]));
      acc.add(rec.k, bound - energy[i],
              kRelativeTolerance * std::abs(bound) + budget[i] + rounding);
    }
    report.checks.push_back(acc.finish());
  }

  if (trace.method == Method::fista_phase_space && first.v) {
    const auto energy = fista_lyapunov(problem, trace, ref.x, ref.phi);
    auto run = [&](double factor, const char* name) {
      CheckAccumulator acc(name);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::isnan(energy[i]) || std::isnan(energy[i + 1])) continue;
        const double contracted = (1.0 + factor) * energy[i + 1];
        const double allowance = kRelativeTolerance * std::abs(energy[i]) + budget[i + 1] +
                                 (2.0 + factor) * objective_rounding(i + 1);
        acc.add(trace.records[i + 1].k, energy[i] - contracted, allowance);
      }
      report.checks.push_back(acc.finish());
    };
    run(fista_lyapunov_min_factor(meta.mu, s), "lyapunov_decay_min_factor");
    run(std::sqrt(meta.mu * s) / 4.0, "lyapunov_decay_quarter");
  }

  // The pivotal inequality holds for any comparison point; x_ref is used.
  if (first.has_iterates()) {
    CheckAccumulator acc("pivotal (step-scaled)");
    for (std::size_t i = 0; i < n; ++i) {
      const auto& rec = trace.records[i];
      if (!rec.has_iterates()) continue;
      const SignedSlack sl = check_pivotal(problem, ref.x, rec.y, s);
      acc.add(rec.k, sl.slack, kRelativeTolerance * sl.scale);
    }
    report.checks.push_back(acc.finish());
  }

  if (report.checks.empty()) report.note = "no applicable checks";
  return report;
}

}  // namespace proxcert
