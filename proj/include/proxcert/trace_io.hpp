#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proxcert/certify.hpp"
#include "proxcert/solvers.hpp"

namespace proxcert {

/// Column header of trace files, in order.
inline constexpr std::string_view kTraceCsvHeader =
    "k,gs_norm_sq,phi_x_gap,phi_y_gap,lyapunov,envelope_obj,envelope_grad";

/// Persisted form of one trace row. Absent or non-finite values are empty.
struct TraceRow {
  std::size_t k = 0;
  std::optional<double> gs_norm_sq;
  std::optional<double> phi_x_gap;
  std::optional<double> phi_y_gap;
  std::optional<double> lyapunov;
  std::optional<double> envelope_obj;
  std::optional<double> envelope_grad;

  bool operator==(const TraceRow&) const = default;
};

/// Run metadata written as "# key=value" lines above the column header.
struct TraceHeader {
  Method method = Method::ista;
  double step = 0.0;
  double mu = 0.0;
  double lipschitz = 0.0;
  double lambda = 0.0;
  Index dimension = 0;
  std::size_t max_iters = 0;
  double grad_tol = 0.0;
  Termination terminated_by = Termination::max_iters;
  double reference_tol = 0.0;
  double phi_ref = 0.0;
  double reference_residual = 0.0;
  std::string x0 = "zeros";  // "zeros" or the path of a vector file
  std::size_t records = 0;

  bool operator==(const TraceHeader&) const = default;
};

struct TraceTable {
  TraceHeader header;
  std::vector<TraceRow> rows;

  bool operator==(const TraceTable&) const = default;
};

/// Turns an in-memory trace into its persisted table: objective gaps against
/// the reference, the method's Lyapunov series (empty for the momentum form),
/// and the theorem envelopes when the step is inside their range.
TraceTable tabulate_trace(const CompositeProblem& problem, const SolverTrace& trace,
                          const ReferenceSolution& ref, double reference_tol,
                          const std::string& x0_label = "zeros");

std::string format_trace_csv(const TraceTable& table);
TraceTable parse_trace_csv(std::string_view text);
void write_trace_csv(const TraceTable& table, const std::filesystem::path& path);
TraceTable read_trace_csv(const std::filesystem::path& path);

/// First k with gs_norm_sq <= threshold.
std::optional<std::size_t> iterations_to_tolerance(const TraceTable& table, double threshold);

enum class PlotSeries { gs, obj, lyapunov };
std::optional<PlotSeries> parse_plot_series(std::string_view name);

struct PlotPoint {
  std::size_t k = 0;
  std::optional<double> value;
  std::optional<double> envelope;
};

/// (k, value, envelope) triples for a series; log10 maps both columns and
/// turns non-positive values into absent ones. Throws InvalidArgument when
/// the series is absent from the table.
std::vector<PlotPoint> plot_series(const TraceTable& table, PlotSeries series, bool log10);

/// CSV with header "k,value,envelope"; absent values are empty fields.
std::string format_plot_data(const std::vector<PlotPoint>& points);

/// Round-trippable decimal text ("%.17g"), empty when absent or non-finite.
std::string format_number(std::optional<double> value);

/// JSON object {check_name: {tested, worst_slack, worst_index, tolerance, pass}, ...}
/// plus tolerance_policy, reference_residual, certifiable, passed and note.
std::string report_to_json(const CertificateReport& report);
void write_report(const CertificateReport& report, const std::filesystem::path& path);

}  // namespace proxcert
