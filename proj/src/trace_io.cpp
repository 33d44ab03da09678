#include "proxcert/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "proxcert/errors.hpp"

namespace proxcert {

namespace {

std::optional<double> finite_or_empty(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view field, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(std::string("trace: bad number for ") + what + ": '" + std::string(field) + "'");
  }
  return v;
}

std::size_t parse_count(std::string_view field, const char* what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(std::string("trace: bad integer for ") + what + ": '" + std::string(field) + "'");
  }
  return v;
}

std::optional<double> parse_optional(std::string_view field, const char* what) {
  if (field.empty()) return std::nullopt;
  return parse_double(field, what);
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_number(std::optional<double> value) {
  if (!value || !std::isfinite(*value)) return {};
  return number(*value);
}

TraceTable tabulate_trace(const CompositeProblem& problem, const SolverTrace& trace,
                          const ReferenceSolution& ref, double reference_tol,
                          const std::string& x0_label) {
  TraceTable table;
  TraceHeader& h = table.header;
  h.method = trace.method;
  h.step = trace.problem.step;
  h.mu = trace.problem.mu;
  h.lipschitz = trace.problem.lipschitz;
  h.lambda = trace.problem.lambda;
  h.dimension = trace.problem.dimension;
  h.max_iters = trace.stop.max_iters;
  h.grad_tol = trace.stop.grad_tol;
  h.terminated_by = trace.terminated_by;
  h.reference_tol = reference_tol;
  h.phi_ref = ref.phi;
  h.reference_residual = ref.residual;
  h.x0 = x0_label;
  h.records = trace.records.size();

  const TraceEnvelopes env = envelopes_for(problem, trace, ref);
  std::vector<double> energy;
  if (trace.method == Method::ista) {
    energy = ista_lyapunov(trace, ref.x);
  } else if (trace.method == Method::fista_phase_space) {
    energy = fista_lyapunov(problem, trace, ref.x, ref.phi);
  }

  table.rows.reserve(trace.records.size());
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const IterateRecord& rec = trace.records[i];
    TraceRow row;
    row.k = rec.k;
    row.gs_norm_sq = finite_or_empty(rec.gs_norm_sq);
    if (rec.has_iterates()) {
      row.phi_x_gap = finite_or_empty(problem.objective(rec.x) - ref.phi);
      row.phi_y_gap = finite_or_empty(problem.objective(rec.y) - ref.phi);
    }
    if (!energy.empty()) row.lyapunov = finite_or_empty(energy[i]);
    if (env.objective) row.envelope_obj = finite_or_empty(env.objective->evaluate(rec.k));
    if (env.gradient) row.envelope_grad = finite_or_empty(env.gradient->evaluate(rec.k));
    table.rows.push_back(row);
  }
  return table;
}

std::string format_trace_csv(const TraceTable& table) {
  const TraceHeader& h = table.header;
  std::ostringstream out;
  out << "# method=" << to_string(h.method) << '\n'
      << "# step=" << number(h.step) << '\n'
      << "# mu=" << number(h.mu) << '\n'
      << "# L=" << number(h.lipschitz) << '\n'
      << "# lambda=" << number(h.lambda) << '\n'
      << "# dimension=" << h.dimension << '\n'
      << "# max_iters=" << h.max_iters << '\n'
      << "# grad_tol=" << number(h.grad_tol) << '\n'
      << "# terminated_by=" << to_string(h.terminated_by) << '\n'
      << "# reference_tol=" << number(h.reference_tol) << '\n'
      << "# phi_ref=" << number(h.phi_ref) << '\n'
      << "# reference_residual=" << number(h.reference_residual) << '\n'
      << "# x0=" << h.x0 << '\n'
      << "# records=" << table.rows.size() << '\n'
      << kTraceCsvHeader << '\n';
  for (const TraceRow& r : table.rows) {
    out << r.k << ',' << format_number(r.gs_norm_sq) << ',' << format_number(r.phi_x_gap) << ','
        << format_number(r.phi_y_gap) << ',' << format_number(r.lyapunov) << ','
        << format_number(r.envelope_obj) << ',' << format_number(r.envelope_grad) << '\n';
  }
  return out.str();
}

TraceTable parse_trace_csv(std::string_view text) {
  std::map<std::string, std::string, std::less<>> meta;
  TraceTable table;
  bool seen_header = false;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      throw ParseError("trace: last line is not newline-terminated (truncated file?)");
    }
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (!seen_header) {
      if (line.starts_with("#")) {
        line.remove_prefix(1);
        while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("trace: malformed metadata line");
        meta.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
        continue;
      }
      if (line != kTraceCsvHeader) throw ParseError("trace: unexpected column header");
      seen_header = true;
      continue;
    }

    const auto fields = split(line, ',');
    if (fields.size() != 7) {
      throw ParseError("trace: line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected 7");
    }
    TraceRow r;
    r.k = parse_count(fields[0], "k");
    r.gs_norm_sq = parse_optional(fields[1], "gs_norm_sq");
    r.phi_x_gap = parse_optional(fields[2], "phi_x_gap");
    r.phi_y_gap = parse_optional(fields[3], "phi_y_gap");
    r.lyapunov = parse_optional(fields[4], "lyapunov");
    r.envelope_obj = parse_optional(fields[5], "envelope_obj");
    r.envelope_grad = parse_optional(fields[6], "envelope_grad");
    if (!table.rows.empty() && r.k <= table.rows.back().k) {
      throw ParseError("trace: k must be strictly increasing");
    }
    table.rows.push_back(r);
  }
  if (!seen_header) throw ParseError("trace: missing column header");

  auto get = [&](const char* key) -> const std::string& {
    const auto it = meta.find(key);
    if (it == meta.end()) throw ParseError(std::string("trace: missing metadata '") + key + "'");
    return it->second;
  };
  TraceHeader& h = table.header;
  const auto method = parse_method(get("method"));
  if (!method) throw ParseError("trace: unknown method '" + get("method") + "'");
  h.method = *method;
  h.step = parse_double(get("step"), "step");
  h.mu = parse_double(get("mu"), "mu");
  h.lipschitz = parse_double(get("L"), "L");
  h.lambda = parse_double(get("lambda"), "lambda");
  h.dimension = static_cast<Index>(parse_count(get("dimension"), "dimension"));
  h.max_iters = parse_count(get("max_iters"), "max_iters");
  h.grad_tol = parse_double(get("grad_tol"), "grad_tol");
  const auto term = parse_termination(get("terminated_by"));
  if (!term) throw ParseError("trace: unknown termination '" + get("terminated_by") + "'");
  h.terminated_by = *term;
  h.reference_tol = parse_double(get("reference_tol"), "reference_tol");
  h.phi_ref = parse_double(get("phi_ref"), "phi_ref");
  h.reference_residual = parse_double(get("reference_residual"), "reference_residual");
  h.x0 = get("x0");
  h.records = parse_count(get("records"), "records");
  if (h.records != table.rows.size()) {
    throw ParseError("trace: header announces " + std::to_string(h.records) + " records, found " +
                     std::to_string(table.rows.size()) + " (truncated file?)");
  }
  if (table.rows.empty()) throw ParseError("trace: no records");
  return table;
}

void write_trace_csv(const TraceTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_trace_csv(table);
  if (!out) throw IoError("write failed for " + path.string());
}

TraceTable read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace_csv(ss.str());
}

std::optional<std::size_t> iterations_to_tolerance(const TraceTable& table, double threshold) {
  for (const TraceRow& r : table.rows) {
    if (r.gs_norm_sq && *r.gs_norm_sq <= threshold) return r.k;
  }
  return std::nullopt;
}

std::optional<PlotSeries> parse_plot_series(std::string_view name) {
  if (name == "gs") return PlotSeries::gs;
  if (name == "obj") return PlotSeries::obj;
  if (name == "lyapunov") return PlotSeries::lyapunov;
  return std::nullopt;
}

std::vector<PlotPoint> plot_series(const TraceTable& table, PlotSeries series, bool log10) {
  const TraceHeader& h = table.header;
  auto value_of = [&](const TraceRow& r) -> std::optional<double> {
    switch (series) {
      case PlotSeries::gs: return r.gs_norm_sq;
      case PlotSeries::obj: return h.method == Method::ista ? r.phi_y_gap : r.phi_x_gap;
      case PlotSeries::lyapunov: return r.lyapunov;
    }
    return std::nullopt;
  };
  const bool present = std::any_of(table.rows.begin(), table.rows.end(),
                                   [&](const TraceRow& r) { return value_of(r).has_value(); });
  if (!present) throw InvalidArgument("series is absent from this trace");

  // The Lyapunov envelope is rebuilt from the first value and the method's rate.
  std::optional<RateEnvelope> energy_env;
  if (series == PlotSeries::lyapunov && table.rows.front().lyapunov &&
      h.step <= 1.0 / h.lipschitz) {
    const double e0 = std::max(0.0, *table.rows.front().lyapunov);
    if (h.method == Method::ista) {
      energy_env = RateEnvelope::power(e0, (1.0 - h.mu * h.step) / (1.0 + h.mu * h.step));
    } else {
      energy_env = RateEnvelope::inverse_power(e0, std::sqrt(h.mu * h.step) / 4.0);
    }
  }

  auto transform = [log10](std::optional<double> v) -> std::optional<double> {
    if (!v) return std::nullopt;
    if (!log10) return v;
    if (!(*v > 0.0)) return std::nullopt;
    return std::log10(*v);
  };

  std::vector<PlotPoint> out;
  out.reserve(table.rows.size());
  for (const TraceRow& r : table.rows) {
    PlotPoint p;
    p.k = r.k;
    p.value = transform(value_of(r));
    switch (series) {
      case PlotSeries::gs: p.envelope = transform(r.envelope_grad); break;
      case PlotSeries::obj: p.envelope = transform(r.envelope_obj); break;
      case PlotSeries::lyapunov:
        if (energy_env) p.envelope = transform(energy_env->evaluate(r.k));
        break;
    }
    out.push_back(p);
  }
  return out;
}

std::string format_plot_data(const std::vector<PlotPoint>& points) {
  std::ostringstream out;
  out << "k,value,envelope\n";
  for (const PlotPoint& p : points) {
    out << p.k << ',' << format_number(p.value) << ',' << format_number(p.envelope) << '\n';
  }
  return out.str();
}

std::string report_to_json(const CertificateReport& report) {
  using nlohmann::ordered_json;
  ordered_json j = ordered_json::object();
  auto num = [](double v) -> ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return v;
  };
  for (const CheckResult& c : report.checks) {
    j[c.name] = {{"tested", c.tested},
                 {"worst_slack", num(c.worst_slack)},
                 {"worst_index", c.worst_index},
                 {"tolerance", num(c.tolerance)},
                 {"pass", c.pass}};
  }
  j["tolerance_policy"] = report.tolerance_policy;
  j["reference_residual"] = num(report.reference_residual);
  j["certifiable"] = report.certifiable;
  j["passed"] = report.passed();
  j["note"] = report.note;
  return j.dump(2) + "\n";
}

void write_report(const CertificateReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << report_to_json(report);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace proxcert
