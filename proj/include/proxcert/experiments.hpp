#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proxcert/certify.hpp"
#include "proxcert/instances.hpp"
#include "proxcert/solvers.hpp"
#include "proxcert/trace_io.hpp"

namespace proxcert {

struct InstanceSpec {
  enum class Kind { paper, tridiagonal, random_lasso, file };
  Kind kind = Kind::paper;

  // tridiagonal
  Index n = kPaperDimension;
  double diag = kPaperDiagonal;
  double offdiag = kPaperOffDiagonal;
  double b_fill = 1.0;
  // random_lasso
  Index m = 0;
  Index d = 0;
  double mu_target = 0.0;
  double lipschitz_target = 0.0;
  std::uint64_t seed = 0;
  // tridiagonal and random_lasso
  double lambda = kPaperLambda;
  // file
  std::filesystem::path path;
};

CompositeProblem build_instance(const InstanceSpec& spec);

inline constexpr double kDefaultReferenceTol = 1e-13;
inline const std::vector<double> kDefaultThresholds = {1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12};

/// Experiment description, read from JSON:
/// {
///   "instance": {"type": "paper"}
///             | {"type": "tridiagonal", "n", "diag", "offdiag", "b_fill", "lambda"}
///             | {"type": "random_lasso", "m", "d", "mu_target", "L_target", "seed", "lambda"}
///             | {"type": "file", "path"},
///   "solvers": ["ista", "fista_momentum", "fista_phase_space"],
///   "step": 0.05 | "one_over_L",
///   "x0": "zeros" | {"file": "x0.json"},
///   "stop": {"max_iters": 10000, "grad_tol": 0},
///   "reference_tol": 1e-13,
///   "thresholds": [1e-2, ...],
///   "output_dir": "out"
/// }
struct ExperimentConfig {
  InstanceSpec instance;
  std::vector<Method> solvers;
  std::optional<double> step;  // empty: 1/L
  std::optional<std::filesystem::path> x0_file;
  StoppingRule stop;
  double reference_tol = kDefaultReferenceTol;
  std::vector<double> thresholds = kDefaultThresholds;
  std::filesystem::path output_dir = "out";
  // Run the solvers on separate threads. Output does not depend on it.
  bool parallel = true;
};

ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct SolverOutcome {
  Method method = Method::ista;
  std::filesystem::path trace_file;
  std::filesystem::path report_file;
  std::filesystem::path plot_file;
  std::map<double, std::optional<std::size_t>> iterations_to_threshold;
  Termination terminated_by = Termination::max_iters;
  bool certifiable = false;
  bool certified = false;
};

struct ExperimentResult {
  std::vector<SolverOutcome> runs;
  std::filesystem::path summary_file;
};

/// Writes, per solver, <method>_trace.csv, <method>_report.json and
/// <method>_plot.csv (gs series with its envelope), plus summary.json with
/// iterations-to-threshold per solver. The output directory is checked for
/// writability before anything is solved.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct TailRate {
  double ratio = 1.0;             // per-iteration factor exp(slope)
  std::size_t records_used = 0;   // length of the fitted tail
  bool truncated_at_zero = false; // series hit an exact 0; fit used the positive prefix
};

/// Least-squares slope of log(values) against k over the last half of the
/// positive prefix, returned as exp(slope). Needs at least 20 positive values.
TailRate tail_rate_estimate(std::span<const double> gs_norm_sq);
TailRate tail_rate_estimate(const SolverTrace& trace);

std::optional<std::size_t> iterations_to_tolerance(const SolverTrace& trace, double threshold);

/// Re-runs the solver recorded in a trace table on `problem`, checks that the
/// replay reproduces the table (metadata and |G_s|^2 column), then certifies
/// the replayed trace. Throws InvalidArgument on any mismatch.
CertificateReport certify_trace_file(const TraceTable& table, const CompositeProblem& problem);

}  // namespace proxcert
