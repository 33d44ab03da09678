/* C interface to the proxcert library.
 *
 * Every call returns a pc_status. On failure a message is available from
 * pc_last_error() until the next failing call on the same thread. Handles are
 * opaque; release them with the matching *_free function (NULL is accepted).
 */
#ifndef PROXCERT_H
#define PROXCERT_H

#include <stddef.h>
#include <stdint.h>

#if defined(PROXCERT_BUILDING_LIBRARY)
#define PC_API __attribute__((visibility("default")))
#else
#define PC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pc_status {
  PC_OK = 0,
  PC_ERR_INVALID_ARGUMENT = 1,
  PC_ERR_SHAPE = 2,
  PC_ERR_IO = 3,
  PC_ERR_PARSE = 4,
  PC_ERR_THEOREM_RANGE = 5,
  PC_ERR_NUMERICAL = 6,
  PC_ERR_INTERNAL = 7
} pc_status;

typedef enum pc_method {
  PC_METHOD_ISTA = 0,
  PC_METHOD_FISTA_MOMENTUM = 1,
  PC_METHOD_FISTA_PHASE_SPACE = 2
} pc_method;

typedef enum pc_termination {
  PC_TERM_TOLERANCE = 0,
  PC_TERM_MAX_ITERS = 1,
  PC_TERM_DIVERGED = 2
} pc_termination;

typedef struct pc_problem pc_problem;
typedef struct pc_trace pc_trace;
typedef struct pc_report pc_report;
typedef struct pc_experiment pc_experiment;

PC_API const char* pc_last_error(void);
PC_API const char* pc_version(void);
PC_API const char* pc_status_name(pc_status status);

/* Spectrum of A^T A for the constant-diagonal symmetric tridiagonal A. */
PC_API pc_status pc_tridiagonal_spectrum(int64_t n, double diag, double offdiag, double* mu,
                                         double* lipschitz);
/* *finite is set to 0 (and *cond to +inf) when mu == 0. */
PC_API pc_status pc_condition_number(double mu, double lipschitz, double* cond, int* finite);

/* Problems. */
PC_API pc_status pc_problem_paper(pc_problem** out, double* default_step);
PC_API pc_status pc_problem_tridiagonal(int64_t n, double diag, double offdiag, double b_fill,
                                        double lambda, pc_problem** out);
PC_API pc_status pc_problem_random_lasso(int64_t m, int64_t d, double mu, double lipschitz,
                                         uint64_t seed, double lambda, pc_problem** out);
PC_API pc_status pc_problem_load(const char* path, pc_problem** out);
PC_API pc_status pc_problem_save(const pc_problem* problem, const char* path);
PC_API pc_status pc_problem_info(const pc_problem* problem, double* mu, double* lipschitz,
                                 int64_t* dimension);
PC_API void pc_problem_free(pc_problem* problem);

/* Solving. "fista" and "fista-phase" are accepted as method aliases. */
PC_API pc_status pc_parse_method(const char* name, pc_method* out);
PC_API const char* pc_method_name(pc_method method);

typedef struct pc_solve_options {
  pc_method method;
  double step;
  size_t max_iters;
  double grad_tol;
  const char* x0_path;  /* JSON array file, or NULL for zeros */
  double reference_tol; /* <= 0 selects the default */
} pc_solve_options;

PC_API void pc_solve_options_init(pc_solve_options* options);

/* Runs the solver and the reference computation. */
PC_API pc_status pc_solve(const pc_problem* problem, const pc_solve_options* options,
                          pc_trace** out);

typedef struct pc_trace_summary {
  size_t final_k;
  double final_gs_norm_sq;
  double final_phi_gap; /* Phi(x_k) - Phi_ref, NaN when unavailable */
  double phi_ref;
  double reference_residual;
  pc_termination terminated_by;
  int step_exceeds_inverse_lipschitz;
} pc_trace_summary;

PC_API pc_status pc_trace_summary_get(const pc_trace* trace, pc_trace_summary* out);
PC_API pc_status pc_trace_write_csv(const pc_trace* trace, const char* path);
PC_API pc_status pc_trace_certify(const pc_trace* trace, pc_report** out);
PC_API void pc_trace_free(pc_trace* trace);

/* Replays a trace file on `problem` and certifies the replay. A trace that
 * does not match the instance is PC_ERR_INVALID_ARGUMENT; a malformed or
 * truncated file is PC_ERR_PARSE. */
PC_API pc_status pc_certify_trace_file(const char* trace_path, const pc_problem* problem,
                                       pc_report** out);

typedef struct pc_check_info {
  const char* name; /* valid while the report lives */
  size_t tested;
  double worst_slack;
  size_t worst_index;
  double tolerance;
  int pass;
} pc_check_info;

PC_API int pc_report_passed(const pc_report* report);
PC_API int pc_report_certifiable(const pc_report* report);
PC_API const char* pc_report_note(const pc_report* report);
PC_API size_t pc_report_check_count(const pc_report* report);
PC_API pc_status pc_report_check(const pc_report* report, size_t index, pc_check_info* out);
PC_API pc_status pc_report_write(const pc_report* report, const char* path);
PC_API void pc_report_free(pc_report* report);

/* Plot data ("k,value,envelope") for series "gs", "obj" or "lyapunov".
 * A series absent from the trace is PC_ERR_INVALID_ARGUMENT. */
PC_API pc_status pc_plotdata(const char* trace_path, const char* series, int log10,
                             const char* out_path);

/* Experiments driven by a JSON config file. */
PC_API pc_status pc_experiment_run(const char* config_path, pc_experiment** out);

typedef struct pc_run_info {
  pc_method method;
  pc_termination terminated_by;
  int certifiable;
  int certified;
} pc_run_info;

PC_API size_t pc_experiment_run_count(const pc_experiment* experiment);
PC_API pc_status pc_experiment_run_info(const pc_experiment* experiment, size_t index,
                                        pc_run_info* out);
PC_API const char* pc_experiment_summary_path(const pc_experiment* experiment);
PC_API void pc_experiment_free(pc_experiment* experiment);

#ifdef __cplusplus
}
#endif

#endif /* PROXCERT_H */
