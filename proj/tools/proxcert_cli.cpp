// Command-line front end. Everything numeric goes through the C API.

#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>

#include "proxcert/proxcert.h"

namespace {

enum Exit { kOk = 0, kCertFailed = 1, kUsage = 2, kDiverged = 3 };

struct Failure {
  int code;
};

// Errors from the library all land on the usage/config exit code; the only
// numeric outcomes with their own codes are certification and divergence.
void check(pc_status st, const char* what) {
  if (st == PC_OK) return;
  std::fprintf(stderr, "error: %s: %s (%s)\n", what, pc_last_error(), pc_status_name(st));
  throw Failure{kUsage};
}

struct ProblemHandle {
  pc_problem* p = nullptr;
  ~ProblemHandle() { pc_problem_free(p); }
};

struct SourceFlags {
  std::string instance;
  bool paper = false;
};

void add_source(CLI::App* cmd, SourceFlags& src) {
  auto* inst = cmd->add_option("--instance", src.instance, "instance JSON file");
  auto* paper = cmd->add_flag("--paper", src.paper, "built-in 500-dimensional tridiagonal lasso");
  inst->excludes(paper);
}

void load_source(const SourceFlags& src, ProblemHandle& out, double* default_step) {
  if (src.paper) {
    check(pc_problem_paper(&out.p, default_step), "building the paper instance");
  } else if (!src.instance.empty()) {
    check(pc_problem_load(src.instance.c_str(), &out.p), "loading the instance");
  } else {
    std::fprintf(stderr, "error: one of --instance or --paper is required\n");
    throw Failure{kUsage};
  }
}

void print_report(const pc_report* report) {
  const std::size_t n = pc_report_check_count(report);
  for (std::size_t i = 0; i < n; ++i) {
    pc_check_info c{};
    check(pc_report_check(report, i, &c), "reading the report");
    std::printf("%-32s %s  tested=%zu worst_slack=%.6g at k=%zu\n", c.name,
                c.pass ? "pass" : "FAIL", c.tested, c.worst_slack, c.worst_index);
  }
  if (!pc_report_certifiable(report)) std::printf("%s\n", pc_report_note(report));
}

// --- solve -----------------------------------------------------------------

struct SolveFlags {
  SourceFlags src;
  std::string method;
  std::string step = "auto";
  std::string intent = "objective";
  std::size_t max_iters = 10000;
  double grad_tol = 0.0;
  std::string x0;
  double reference_tol = 1e-13;
  std::string out = ".";
};

int cmd_solve(const SolveFlags& f) {
  ProblemHandle prob;
  load_source(f.src, prob, nullptr);
  pc_solve_options opt;
  pc_solve_options_init(&opt);
  check(pc_parse_method(f.method.c_str(), &opt.method), "--method");

  double lipschitz = 0.0;
  check(pc_problem_info(prob.p, nullptr, &lipschitz, nullptr), "reading the instance");
  if (f.step == "auto") {
    // The gradient envelope for FISTA needs s strictly below 1/L.
    opt.step = f.intent == "gradient" ? 1.0 / (2.0 * lipschitz) : 1.0 / lipschitz;
  } else {
    try {
      std::size_t used = 0;
      opt.step = std::stod(f.step, &used);
      if (used != f.step.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --step must be a number or 'auto', got '%s'\n", f.step.c_str());
      return kUsage;
    }
  }
  opt.max_iters = f.max_iters;
  opt.grad_tol = f.grad_tol;
  opt.reference_tol = f.reference_tol;
  if (!f.x0.empty()) opt.x0_path = f.x0.c_str();

  pc_trace* trace = nullptr;
  check(pc_solve(prob.p, &opt, &trace), "solving");
  struct TraceGuard {
    pc_trace* t;
    ~TraceGuard() { pc_trace_free(t); }
  } guard{trace};

  const std::string path = f.out + "/" + pc_method_name(opt.method) + "_trace.csv";
  check(pc_trace_write_csv(trace, path.c_str()), "writing the trace");

  pc_trace_summary s{};
  check(pc_trace_summary_get(trace, &s), "summarizing");
  std::printf("trace      %s\n", path.c_str());
  std::printf("step       %.17g\n", opt.step);
  std::printf("final k    %zu\n", s.final_k);
  std::printf("|G_s|^2    %.6e\n", s.final_gs_norm_sq);
  std::printf("phi gap    %.6e (reference residual %.3e)\n", s.final_phi_gap, s.reference_residual);
  if (s.step_exceeds_inverse_lipschitz) std::printf("note       step exceeds 1/L\n");
  if (s.terminated_by == PC_TERM_DIVERGED) {
    std::fprintf(stderr, "diverged at k=%zu\n", s.final_k);
    return kDiverged;
  }
  return kOk;
}

// --- certify ---------------------------------------------------------------

struct CertifyFlags {
  SourceFlags src;
  std::string trace;
  std::string report;
};

int cmd_certify(const CertifyFlags& f) {
  ProblemHandle prob;
  load_source(f.src, prob, nullptr);
  pc_report* report = nullptr;
  check(pc_certify_trace_file(f.trace.c_str(), prob.p, &report), "certifying");
  struct ReportGuard {
    pc_report* r;
    ~ReportGuard() { pc_report_free(r); }
  } guard{report};
  check(pc_report_write(report, f.report.c_str()), "writing the report");
  print_report(report);
  const bool ok = pc_report_passed(report) != 0;
  std::printf("%s\n", ok ? "certified" : "not certified");
  return ok ? kOk : kCertFailed;
}

// --- spectrum --------------------------------------------------------------

struct SpectrumFlags {
  std::string tridiagonal;
  std::string instance;
};

int cmd_spectrum(const SpectrumFlags& f) {
  double mu = 0.0;
  double lipschitz = 0.0;
  if (!f.tridiagonal.empty()) {
    long long n = 0;
    double d = 0.0;
    double o = 0.0;
    char tail = 0;
    if (std::sscanf(f.tridiagonal.c_str(), "%lld,%lf,%lf%c", &n, &d, &o, &tail) != 3) {
      std::fprintf(stderr, "error: --tridiagonal expects n,diag,offdiag\n");
      return kUsage;
    }
    check(pc_tridiagonal_spectrum(n, d, o, &mu, &lipschitz), "--tridiagonal");
  } else if (!f.instance.empty()) {
    ProblemHandle prob;
    check(pc_problem_load(f.instance.c_str(), &prob.p), "loading the instance");
    check(pc_problem_info(prob.p, &mu, &lipschitz, nullptr), "reading the instance");
  } else {
    std::fprintf(stderr, "error: one of --tridiagonal or --instance is required\n");
    return kUsage;
  }
  double cond = 0.0;
  int finite = 0;
  check(pc_condition_number(mu, lipschitz, &cond, &finite), "condition number");
  std::printf("mu   %.6g\n", mu);
  std::printf("L    %.6g\n", lipschitz);
  if (finite) {
    std::printf("cond %.6g\n", cond);
  } else {
    std::printf("cond inf\n");
  }
  return kOk;
}

// --- plotdata --------------------------------------------------------------

struct PlotFlags {
  std::string trace;
  std::string series;
  bool log10 = false;
  std::string out;
};

int cmd_plotdata(const PlotFlags& f) {
  check(pc_plotdata(f.trace.c_str(), f.series.c_str(), f.log10 ? 1 : 0, f.out.c_str()),
        "plot data");
  return kOk;
}

// --- experiment ------------------------------------------------------------

int cmd_experiment(const std::string& config) {
  pc_experiment* exp = nullptr;
  check(pc_experiment_run(config.c_str(), &exp), "experiment");
  struct ExpGuard {
    pc_experiment* e;
    ~ExpGuard() { pc_experiment_free(e); }
  } guard{exp};
  bool diverged = false;
  bool all_certified = true;
  for (std::size_t i = 0; i < pc_experiment_run_count(exp); ++i) {
    pc_run_info info{};
    check(pc_experiment_run_info(exp, i, &info), "experiment");
    const char* status = !info.certifiable ? "uncertifiable" : info.certified ? "certified" : "FAILED";
    std::printf("%-18s %s\n", pc_method_name(info.method), status);
    diverged = diverged || info.terminated_by == PC_TERM_DIVERGED;
    all_certified = all_certified && info.certified;
  }
  std::printf("summary %s\n", pc_experiment_summary_path(exp));
  if (diverged) return kDiverged;
  return all_certified ? kOk : kCertFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximal gradient solvers with convergence-rate certificates"};
  app.require_subcommand(1);

  SolveFlags solve;
  auto* s = app.add_subcommand("solve", "run a solver and write its trace");
  add_source(s, solve.src);
  s->add_option("--method", solve.method, "ista | fista | fista-phase")->required();
  s->add_option("--step", solve.step, "step size or 'auto'");
  s->add_option("--intent", solve.intent, "what 'auto' targets: objective (1/L) or gradient (1/(2L))")
      ->check(CLI::IsMember({"objective", "gradient"}));
  s->add_option("--max-iters", solve.max_iters);
  s->add_option("--grad-tol", solve.grad_tol, "stop once |G_s|^2 <= this");
  s->add_option("--x0", solve.x0, "starting point (JSON array); zeros by default");
  s->add_option("--reference-tol", solve.reference_tol);
  s->add_option("--out", solve.out, "output directory");

  CertifyFlags cert;
  auto* c = app.add_subcommand("certify", "check a trace file against the rate theorems");
  add_source(c, cert.src);
  c->add_option("--trace", cert.trace)->required();
  c->add_option("--report", cert.report)->required();

  SpectrumFlags spec;
  auto* sp = app.add_subcommand("spectrum", "print mu, L and L/mu");
  auto* tri = sp->add_option("--tridiagonal", spec.tridiagonal, "n,diag,offdiag");
  auto* spi = sp->add_option("--instance", spec.instance);
  tri->excludes(spi);

  PlotFlags plot;
  auto* p = app.add_subcommand("plotdata", "extract a (k, value, envelope) series");
  p->add_option("--trace", plot.trace)->required();
  p->add_option("--series", plot.series, "gs | obj | lyapunov")->required();
  p->add_flag("--log10", plot.log10);
  p->add_option("--out", plot.out)->required();

  std::string config;
  auto* e = app.add_subcommand("experiment", "run an experiment config");
  e->add_option("--config", config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::CallForAllHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsage;
  }

  try {
    if (s->parsed()) return cmd_solve(solve);
    if (c->parsed()) return cmd_certify(cert);
    if (sp->parsed()) return cmd_spectrum(spec);
    if (p->parsed()) return cmd_plotdata(plot);
    if (e->parsed()) return cmd_experiment(config);
  } catch (const Failure& f) {
    return f.code;
  }
  return kUsage;
}
