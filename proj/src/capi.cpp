#include "proxcert/proxcert.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <string>

#include "proxcert/errors.hpp"
#include "proxcert/experiments.hpp"

using namespace proxcert;

struct pc_problem {
  std::shared_ptr<const CompositeProblem> problem;
};

struct pc_trace {
  std::shared_ptr<const CompositeProblem> problem;
  SolverTrace trace;
  ReferenceSolution ref;
  TraceTable table;
};

struct pc_report {
  CertificateReport report;
};

struct pc_experiment {
  ExperimentResult result;
  std::string summary_path;
};

namespace {

thread_local std::string last_error;

pc_status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return PC_ERR_INVALID_ARGUMENT;
    case ErrorCode::shape: return PC_ERR_SHAPE;
    case ErrorCode::io: return PC_ERR_IO;
    case ErrorCode::parse: return PC_ERR_PARSE;
    case ErrorCode::theorem_range: return PC_ERR_THEOREM_RANGE;
    case ErrorCode::numerical: return PC_ERR_NUMERICAL;
  }
  return PC_ERR_INTERNAL;
}

template <class F>
pc_status guarded(F&& body) {
  try {
    body();
    return PC_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PC_ERR_INTERNAL;
  }
}

template <class T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw InvalidArgument(std::string(what) + " must not be null");
}

pc_problem* wrap(CompositeProblem p) {
  return new pc_problem{std::make_shared<const CompositeProblem>(std::move(p))};
}

pc_termination to_c(Termination t) {
  switch (t) {
    case Termination::tolerance: return PC_TERM_TOLERANCE;
    case Termination::max_iters: return PC_TERM_MAX_ITERS;
    case Termination::diverged: return PC_TERM_DIVERGED;
  }
  return PC_TERM_MAX_ITERS;
}

Method from_c(pc_method m) {
  switch (m) {
    case PC_METHOD_ISTA: return Method::ista;
    case PC_METHOD_FISTA_MOMENTUM: return Method::fista_momentum;
    case PC_METHOD_FISTA_PHASE_SPACE: return Method::fista_phase_space;
  }
  throw InvalidArgument("unknown method value");
}

pc_method to_c(Method m) {
  switch (m) {
    case Method::ista: return PC_METHOD_ISTA;
    case Method::fista_momentum: return PC_METHOD_FISTA_MOMENTUM;
    case Method::fista_phase_space: return PC_METHOD_FISTA_PHASE_SPACE;
  }
  return PC_METHOD_ISTA;
}

}  // namespace

extern "C" {

const char* pc_last_error(void) { return last_error.c_str(); }

const char* pc_version(void) { return "0.1.0"; }

const char* pc_status_name(pc_status status) {
  switch (status) {
    case PC_OK: return "ok";
    case PC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PC_ERR_SHAPE: return "shape mismatch";
    case PC_ERR_IO: return "i/o error";
    case PC_ERR_PARSE: return "parse error";
    case PC_ERR_THEOREM_RANGE: return "outside theorem range";
    case PC_ERR_NUMERICAL: return "numerical error";
    case PC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

pc_status pc_tridiagonal_spectrum(int64_t n, double diag, double offdiag, double* mu,
                                  double* lipschitz) {
  return guarded([&] {
    require(mu, "mu");
    require(lipschitz, "lipschitz");
    const Spectrum sp = tridiagonal_spectrum(static_cast<Index>(n), diag, offdiag);
    *mu = sp.mu;
    *lipschitz = sp.lipschitz;
  });
}

pc_status pc_condition_number(double mu, double lipschitz, double* cond, int* finite) {
  return guarded([&] {
    require(cond, "cond");
    require(finite, "finite");
    const auto c = condition_number(mu, lipschitz);
    *finite = c.has_value() ? 1 : 0;
    *cond = c.value_or(std::numeric_limits<double>::infinity());
  });
}

pc_status pc_problem_paper(pc_problem** out, double* default_step) {
  return guarded([&] {
    require(out, "out");
    PaperInstance inst = build_paper_instance();
    if (default_step != nullptr) *default_step = inst.step;
    *out = wrap(std::move(inst.problem));
  });
}

pc_status pc_problem_tridiagonal(int64_t n, double diag, double offdiag, double b_fill,
                                 double lambda, pc_problem** out) {
  return guarded([&] {
    require(out, "out");
    *out = wrap(build_tridiagonal_instance(static_cast<Index>(n), diag, offdiag, b_fill, lambda));
  });
}

pc_status pc_problem_random_lasso(int64_t m, int64_t d, double mu, double lipschitz,
                                  uint64_t seed, double lambda, pc_problem** out) {
  return guarded([&] {
    require(out, "out");
    *out = wrap(build_random_lasso(static_cast<Index>(m), static_cast<Index>(d), mu, lipschitz,
                                   seed, lambda));
  });
}

pc_status pc_problem_load(const char* path, pc_problem** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(load_instance(path));
  });
}

pc_status pc_problem_save(const pc_problem* problem, const char* path) {
  return guarded([&] {
    require(problem, "problem");
    require(path, "path");
    save_instance(*problem->problem, path);
  });
}

pc_status pc_problem_info(const pc_problem* problem, double* mu, double* lipschitz,
                          int64_t* dimension) {
  return guarded([&] {
    require(problem, "problem");
    if (mu != nullptr) *mu = problem->problem->mu();
    if (lipschitz != nullptr) *lipschitz = problem->problem->lipschitz();
    if (dimension != nullptr) *dimension = problem->problem->dimension();
  });
}

void pc_problem_free(pc_problem* problem) { delete problem; }

pc_status pc_parse_method(const char* name, pc_method* out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    const auto m = parse_method(name);
    if (!m) throw InvalidArgument(std::string("unknown method '") + name + "'");
    *out = to_c(*m);
  });
}

const char* pc_method_name(pc_method method) {
  switch (method) {
    case PC_METHOD_ISTA: return "ista";
    case PC_METHOD_FISTA_MOMENTUM: return "fista_momentum";
    case PC_METHOD_FISTA_PHASE_SPACE: return "fista_phase_space";
  }
  return "unknown";
}

void pc_solve_options_init(pc_solve_options* options) {
  if (options == nullptr) return;
  options->method = PC_METHOD_ISTA;
  options->step = 0.0;
  options->max_iters = StoppingRule{}.max_iters;
  options->grad_tol = 0.0;
  options->x0_path = nullptr;
  options->reference_tol = kDefaultReferenceTol;
}

pc_status pc_solve(const pc_problem* problem, const pc_solve_options* options, pc_trace** out) {
  return guarded([&] {
    require(problem, "problem");
    require(options, "options");
    require(out, "out");
    const auto& p = problem->problem;
    StoppingRule stop;
    stop.max_iters = options->max_iters;
    stop.grad_tol = options->grad_tol;
    stop.validate();
    const double ref_tol = options->reference_tol > 0.0 ? options->reference_tol
                                                        : kDefaultReferenceTol;
    const std::string x0_label = options->x0_path ? options->x0_path : "zeros";
    const Vector x0 =
        options->x0_path ? load_vector(options->x0_path) : Vector::Zero(p->dimension());
    p->require_dimension(x0);

    auto t = std::make_unique<pc_trace>();
    t->problem = p;
    t->trace = solve(from_c(options->method), *p, x0, options->step, stop);
    t->ref = reference_solution(*p, ref_tol);
    fill_objective_gaps(*p, t->trace, t->ref.phi);
    t->table = tabulate_trace(*p, t->trace, t->ref, ref_tol, x0_label);
    *out = t.release();
  });
}

pc_status pc_trace_summary_get(const pc_trace* trace, pc_trace_summary* out) {
  return guarded([&] {
    require(trace, "trace");
    require(out, "out");
    const IterateRecord& last = trace->trace.last();
    out->final_k = last.k;
    out->final_gs_norm_sq = last.gs_norm_sq;
    out->final_phi_gap = last.objective_gap_x.value_or(std::numeric_limits<double>::quiet_NaN());
    out->phi_ref = trace->ref.phi;
    out->reference_residual = trace->ref.residual;
    out->terminated_by = to_c(trace->trace.terminated_by);
    out->step_exceeds_inverse_lipschitz = trace->trace.step_exceeds_inverse_lipschitz ? 1 : 0;
  });
}

pc_status pc_trace_write_csv(const pc_trace* trace, const char* path) {
  return guarded([&] {
    require(trace, "trace");
    require(path, "path");
    write_trace_csv(trace->table, path);
  });
}

pc_status pc_trace_certify(const pc_trace* trace, pc_report** out) {
  return guarded([&] {
    require(trace, "trace");
    require(out, "out");
    const CompositeProblem& p = *trace->problem;
    *out = new pc_report{
        certify_trace(p, trace->trace, envelopes_for(p, trace->trace, trace->ref), trace->ref)};
  });
}

void pc_trace_free(pc_trace* trace) { delete trace; }

pc_status pc_certify_trace_file(const char* trace_path, const pc_problem* problem,
                                pc_report** out) {
  return guarded([&] {
    require(trace_path, "trace_path");
    require(problem, "problem");
    require(out, "out");
    const TraceTable table = read_trace_csv(trace_path);
    *out = new pc_report{certify_trace_file(table, *problem->problem)};
  });
}

int pc_report_passed(const pc_report* report) {
  return report != nullptr && report->report.passed() ? 1 : 0;
}

int pc_report_certifiable(const pc_report* report) {
  return report != nullptr && report->report.certifiable ? 1 : 0;
}

const char* pc_report_note(const pc_report* report) {
  return report != nullptr ? report->report.note.c_str() : "";
}

size_t pc_report_check_count(const pc_report* report) {
  return report != nullptr ? report->report.checks.size() : 0;
}

pc_status pc_report_check(const pc_report* report, size_t index, pc_check_info* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    if (index >= report->report.checks.size()) throw InvalidArgument("check index out of range");
    const CheckResult& c = report->report.checks[index];
    out->name = c.name.c_str();
    out->tested = c.tested;
    out->worst_slack = c.worst_slack;
    out->worst_index = c.worst_index;
    out->tolerance = c.tolerance;
    out->pass = c.pass ? 1 : 0;
  });
}

pc_status pc_report_write(const pc_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    write_report(report->report, path);
  });
}

void pc_report_free(pc_report* report) { delete report; }

pc_status pc_plotdata(const char* trace_path, const char* series, int log10,
                      const char* out_path) {
  return guarded([&] {
    require(trace_path, "trace_path");
    require(series, "series");
    require(out_path, "out_path");
    const auto which = parse_plot_series(series);
    if (!which) throw InvalidArgument(std::string("unknown series '") + series + "'");
    const TraceTable table = read_trace_csv(trace_path);
    const std::string text = format_plot_data(plot_series(table, *which, log10 != 0));
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError(std::string("cannot write ") + out_path);
    out << text;
    if (!out) throw IoError(std::string("write failed for ") + out_path);
  });
}

pc_status pc_experiment_run(const char* config_path, pc_experiment** out) {
  return guarded([&] {
    require(config_path, "config_path");
    require(out, "out");
    auto e = std::make_unique<pc_experiment>();
    e->result = run_experiment(load_experiment_config(config_path));
    e->summary_path = e->result.summary_file.string();
    *out = e.release();
  });
}

size_t pc_experiment_run_count(const pc_experiment* experiment) {
  return experiment != nullptr ? experiment->result.runs.size() : 0;
}

pc_status pc_experiment_run_info(const pc_experiment* experiment, size_t index,
                                 pc_run_info* out) {
  return guarded([&] {
    require(experiment, "experiment");
    require(out, "out");
    if (index >= experiment->result.runs.size()) throw InvalidArgument("run index out of range");
    const SolverOutcome& o = experiment->result.runs[index];
    out->method = to_c(o.method);
    out->terminated_by = to_c(o.terminated_by);
    out->certifiable = o.certifiable ? 1 : 0;
    out->certified = o.certified ? 1 : 0;
  });
}

const char* pc_experiment_summary_path(const pc_experiment* experiment) {
  return experiment != nullptr ? experiment->summary_path.c_str() : "";
}

void pc_experiment_free(pc_experiment* experiment) { delete experiment; }

}  // extern "C"
