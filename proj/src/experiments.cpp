#include "proxcert/experiments.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <json.hpp>
#include <sstream>

#include "proxcert/errors.hpp"

namespace proxcert {

namespace {

using nlohmann::json;

std::string x0_label(const std::optional<std::filesystem::path>& file) {
  return file ? file->string() : std::string("zeros");
}

void ensure_writable_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".proxcert_write_probe";
  {
    std::ofstream out(probe, std::ios::binary);
    if (!out) throw IoError("output directory is not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

std::string threshold_key(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

bool same_value(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return a.has_value() == b.has_value();
  if (*a == *b) return true;
  return std::abs(*a - *b) <= 1e-12 * std::max(std::abs(*a), std::abs(*b));
}

bool same_scalar(double a, double b) { return same_value(a, b); }

InstanceSpec parse_instance_spec(const json& j) {
  InstanceSpec spec;
  const std::string type = j.at("type").get<std::string>();
  if (type == "paper") {
    spec.kind = InstanceSpec::Kind::paper;
  } else if (type == "tridiagonal") {
    spec.kind = InstanceSpec::Kind::tridiagonal;
    spec.n = j.at("n").get<Index>();
    spec.diag = j.value("diag", kPaperDiagonal);
    spec.offdiag = j.value("offdiag", kPaperOffDiagonal);
    spec.b_fill = j.value("b_fill", 1.0);
    spec.lambda = j.value("lambda", kPaperLambda);
  } else if (type == "random_lasso") {
    spec.kind = InstanceSpec::Kind::random_lasso;
    spec.m = j.at("m").get<Index>();
    spec.d = j.at("d").get<Index>();
    spec.mu_target = j.at("mu_target").get<double>();
    spec.lipschitz_target = j.at("L_target").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.lambda = j.value("lambda", 0.0);
  } else if (type == "file") {
    spec.kind = InstanceSpec::Kind::file;
    spec.path = j.at("path").get<std::string>();
  } else {
    throw InvalidArgument("config: unknown instance type '" + type + "'");
  }
  return spec;
}

}  // namespace

CompositeProblem build_instance(const InstanceSpec& spec) {
  switch (spec.kind) {
    case InstanceSpec::Kind::paper: return build_paper_instance().problem;
    case InstanceSpec::Kind::tridiagonal:
      return build_tridiagonal_instance(spec.n, spec.diag, spec.offdiag, spec.b_fill, spec.lambda);
    case InstanceSpec::Kind::random_lasso:
      return build_random_lasso(spec.m, spec.d, spec.mu_target, spec.lipschitz_target, spec.seed,
                                spec.lambda);
    case InstanceSpec::Kind::file: return load_instance(spec.path);
  }
  throw InvalidArgument("unknown instance kind");
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    static const char* const kKnown[] = {"instance", "solvers",    "step",       "x0",
                                         "stop",     "reference_tol", "thresholds", "output_dir",
                                         "parallel"};
    for (const auto& [key, _] : j.items()) {
      if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
        throw InvalidArgument("config: unknown key '" + key + "'");
      }
    }
    cfg.instance = parse_instance_spec(j.at("instance"));

    for (const auto& s : j.at("solvers")) {
      const auto m = parse_method(s.get<std::string>());
      if (!m) throw InvalidArgument("config: unknown solver '" + s.get<std::string>() + "'");
      cfg.solvers.push_back(*m);
    }
    if (cfg.solvers.empty()) throw InvalidArgument("config: at least one solver is required");

    if (j.contains("step")) {
      const json& st = j.at("step");
      if (st.is_string()) {
        if (st.get<std::string>() != "one_over_L") {
          throw InvalidArgument("config: step must be a number or \"one_over_L\"");
        }
      } else {
        cfg.step = st.get<double>();
        if (!(*cfg.step > 0.0) || !std::isfinite(*cfg.step)) {
          throw InvalidArgument("config: step must be > 0");
        }
      }
    }

    if (j.contains("x0")) {
      const json& x0 = j.at("x0");
      if (x0.is_string()) {
        if (x0.get<std::string>() != "zeros") throw InvalidArgument("config: x0 must be \"zeros\"");
      } else {
        cfg.x0_file = x0.at("file").get<std::string>();
      }
    }

    if (j.contains("stop")) {
      const json& st = j.at("stop");
      cfg.stop.max_iters = st.value("max_iters", cfg.stop.max_iters);
      cfg.stop.grad_tol = st.value("grad_tol", cfg.stop.grad_tol);
    }
    cfg.stop.validate();
    cfg.reference_tol = j.value("reference_tol", kDefaultReferenceTol);
    if (!(cfg.reference_tol > 0.0)) throw InvalidArgument("config: reference_tol must be > 0");
    if (j.contains("thresholds")) cfg.thresholds = j.at("thresholds").get<std::vector<double>>();
    cfg.output_dir = j.value("output_dir", std::string("out"));
    cfg.parallel = j.value("parallel", true);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.solvers.empty()) throw InvalidArgument("experiment needs at least one solver");
  config.stop.validate();
  ensure_writable_directory(config.output_dir);

  const CompositeProblem problem = build_instance(config.instance);
  const double step = config.step.value_or(1.0 / problem.lipschitz());
  const Vector x0 =
      config.x0_file ? load_vector(*config.x0_file) : Vector::Zero(problem.dimension());
  problem.require_dimension(x0);
  const ReferenceSolution ref = reference_solution(problem, config.reference_tol);

  auto run_one = [&](Method method) {
    SolverOutcome out;
    out.method = method;
    const SolverTrace trace = solve(method, problem, x0, step, config.stop);
    const TraceTable table =
        tabulate_trace(problem, trace, ref, config.reference_tol, x0_label(config.x0_file));
    const std::string stem(to_string(method));
    out.trace_file = config.output_dir / (stem + "_trace.csv");
    out.report_file = config.output_dir / (stem + "_report.json");
    out.plot_file = config.output_dir / (stem + "_plot.csv");
    write_trace_csv(table, out.trace_file);

    const CertificateReport report =
        certify_trace(problem, trace, envelopes_for(problem, trace, ref), ref);
    write_report(report, out.report_file);

    std::ofstream plot(out.plot_file, std::ios::binary);
    if (!plot) throw IoError("cannot write " + out.plot_file.string());
    plot << format_plot_data(plot_series(table, PlotSeries::gs, false));

    for (double t : config.thresholds) out.iterations_to_threshold[t] = iterations_to_tolerance(table, t);
    out.terminated_by = trace.terminated_by;
    out.certifiable = report.certifiable;
    out.certified = report.passed();
    return out;
  };

  ExperimentResult result;
  if (config.parallel && config.solvers.size() > 1) {
    std::vector<std::future<SolverOutcome>> futures;
    for (Method m : config.solvers) futures.push_back(std::async(std::launch::async, run_one, m));
    for (auto& f : futures) result.runs.push_back(f.get());
  } else {
    for (Method m : config.solvers) result.runs.push_back(run_one(m));
  }

  nlohmann::ordered_json summary;
  summary["step"] = step;
  summary["mu"] = problem.mu();
  summary["L"] = problem.lipschitz();
  summary["dimension"] = problem.dimension();
  summary["reference"] = {{"phi", ref.phi},
                          {"residual", ref.residual},
                          {"converged", ref.converged},
                          {"iterations", ref.iterations}};
  nlohmann::ordered_json solvers = nlohmann::ordered_json::object();
  for (const SolverOutcome& o : result.runs) {
    nlohmann::ordered_json hits = nlohmann::ordered_json::object();
    for (const auto& [t, k] : o.iterations_to_threshold) {
      hits[threshold_key(t)] = k ? nlohmann::ordered_json(*k) : nlohmann::ordered_json(nullptr);
    }
    solvers[std::string(to_string(o.method))] = {
        {"iterations_to_threshold", hits},
        {"terminated_by", std::string(to_string(o.terminated_by))},
        {"certifiable", o.certifiable},
        {"certified", o.certified},
        {"trace_file", o.trace_file.filename().string()},
        {"report_file", o.report_file.filename().string()},
        {"plot_file", o.plot_file.filename().string()}};
  }
  summary["solvers"] = solvers;
  result.summary_file = config.output_dir / "summary.json";
  std::ofstream out(result.summary_file, std::ios::binary);
  if (!out) throw IoError("cannot write " + result.summary_file.string());
  out << summary.dump(2) << '\n';
  return result;
}

TailRate tail_rate_estimate(std::span<const double> gs_norm_sq) {
  TailRate out;
  std::size_t positive = 0;
  while (positive < gs_norm_sq.size() && gs_norm_sq[positive] > 0.0 &&
         std::isfinite(gs_norm_sq[positive])) {
    ++positive;
  }
  out.truncated_at_zero = positive < gs_norm_sq.size() && gs_norm_sq[positive] == 0.0;
  if (positive < 20) {
    throw InvalidArgument("tail_rate_estimate needs at least 20 positive values");
  }
  const std::size_t begin = positive / 2;
  const std::size_t count = positive - begin;
  double mean_k = 0.0;
  double mean_log = 0.0;
  for (std::size_t i = begin; i < positive; ++i) {
    mean_k += static_cast<double>(i);
    mean_log += std::log(gs_norm_sq[i]);
  }
  mean_k /= static_cast<double>(count);
  mean_log /= static_cast<double>(count);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = begin; i < positive; ++i) {
    const double dk = static_cast<double>(i) - mean_k;
    sxx += dk * dk;
    sxy += dk * (std::log(gs_norm_sq[i]) - mean_log);
  }
  out.ratio = std::exp(sxy / sxx);
  out.records_used = count;
  return out;
}

TailRate tail_rate_estimate(const SolverTrace& trace) {
  std::vector<double> gs;
  gs.reserve(trace.records.size());
  for (const auto& r : trace.records) gs.push_back(r.gs_norm_sq);
  return tail_rate_estimate(gs);
}

std::optional<std::size_t> iterations_to_tolerance(const SolverTrace& trace, double threshold) {
  for (const auto& r : trace.records) {
    if (r.gs_norm_sq <= threshold) return r.k;
  }
  return std::nullopt;
}

CertificateReport certify_trace_file(const TraceTable& table, const CompositeProblem& problem) {
  const TraceHeader& h = table.header;
  if (h.dimension != problem.dimension()) {
    throw InvalidArgument("trace dimension " + std::to_string(h.dimension) +
                          " does not match instance dimension " +
                          std::to_string(problem.dimension()));
  }
  const double lambda = problem.lasso() ? problem.lasso()->lambda : 0.0;
  if (!same_scalar(h.mu, problem.mu()) || !same_scalar(h.lipschitz, problem.lipschitz()) ||
      !same_scalar(h.lambda, lambda)) {
    throw InvalidArgument("trace metadata (mu, L, lambda) does not match the instance");
  }
  const Vector x0 = h.x0 == "zeros" ? Vector::Zero(problem.dimension()) : load_vector(h.x0);
  problem.require_dimension(x0);

  StoppingRule stop;
  stop.max_iters = h.max_iters;
  stop.grad_tol = h.grad_tol;
  const SolverTrace replay = solve(h.method, problem, x0, h.step, stop);
  if (replay.records.size() != table.rows.size() || replay.terminated_by != h.terminated_by) {
    throw InvalidArgument("trace does not match a replay on this instance (" +
                          std::to_string(table.rows.size()) + " rows in file, " +
                          std::to_string(replay.records.size()) + " replayed)");
  }
  for (std::size_t i = 0; i < replay.records.size(); ++i) {
    const auto& rec = replay.records[i];
    const auto& row = table.rows[i];
    std::optional<double> gs;
    if (std::isfinite(rec.gs_norm_sq)) gs = rec.gs_norm_sq;
    if (rec.k != row.k || !same_value(gs, row.gs_norm_sq)) {
      throw InvalidArgument("trace row " + std::to_string(row.k) +
                            " does not match a replay on this instance");
    }
  }

  const ReferenceSolution ref = reference_solution(problem, h.reference_tol);
  return certify_trace(problem, replay, envelopes_for(problem, replay, ref), ref);
}

}  // namespace proxcert
