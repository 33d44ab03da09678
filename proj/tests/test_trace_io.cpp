#include <gtest/gtest.h>

#include <filesystem>
#include <json.hpp>

#include "proxcert/errors.hpp"
#include "proxcert/instances.hpp"
#include "proxcert/prox.hpp"
#include "proxcert/trace_io.hpp"

using namespace proxcert;

namespace {

struct Fixture {
  CompositeProblem problem;
  ReferenceSolution ref;
};

Fixture fixture() {
  auto p = build_random_lasso(15, 10, 0.1, 1.0, 11, 0.05);
  auto ref = reference_solution(p, 1e-13);
  return {std::move(p), std::move(ref)};
}

TraceTable table_for(const Fixture& f, Method m, double s = 0.5, std::size_t iters = 60) {
  const auto trace = solve(m, f.problem, Vector::Zero(10), s, StoppingRule{iters, 0.0});
  return tabulate_trace(f.problem, trace, f.ref, 1e-13);
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("proxcert_test_" + name);
}

}  // namespace

TEST(TraceCsv, RoundTripsFieldForField) {
  const auto f = fixture();
  for (Method m : {Method::ista, Method::fista_momentum, Method::fista_phase_space}) {
    const TraceTable t = table_for(f, m);
    const std::string text = format_trace_csv(t);
    EXPECT_EQ(parse_trace_csv(text), t);
    EXPECT_EQ(format_trace_csv(parse_trace_csv(text)), text);
    const auto path = temp_file("roundtrip.csv");
    write_trace_csv(t, path);
    EXPECT_EQ(read_trace_csv(path), t);
    std::filesystem::remove(path);
  }
}

TEST(TraceCsv, HeaderAndColumns) {
  const auto f = fixture();
  const TraceTable t = table_for(f, Method::fista_momentum);
  const std::string text = format_trace_csv(t);
  EXPECT_NE(text.find(std::string(kTraceCsvHeader) + "\n"), std::string::npos);
  EXPECT_NE(text.find("# method=fista_momentum\n"), std::string::npos);
  // Momentum form carries no Lyapunov column values.
  for (const auto& r : t.rows) EXPECT_FALSE(r.lyapunov.has_value());
  EXPECT_TRUE(t.rows[0].envelope_obj.has_value());
  EXPECT_EQ(t.header.records, t.rows.size());
}

TEST(TraceCsv, SeventeenSignificantDigits) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(std::nullopt), "");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "");
}

TEST(TraceCsv, RejectsDamagedFiles) {
  const auto f = fixture();
  const std::string text = format_trace_csv(table_for(f, Method::ista));
  // Cut in the middle of a line.
  EXPECT_THROW(parse_trace_csv(text.substr(0, text.size() - 7)), ParseError);
  // Cut at a line boundary: the records count no longer matches.
  const std::size_t cut = text.rfind('\n', text.size() - 2);
  EXPECT_THROW(parse_trace_csv(text.substr(0, cut + 1)), ParseError);
  // Wrong header.
  std::string bad = text;
  bad.replace(bad.find("gs_norm_sq"), 10, "gs_norm_SQ");
  EXPECT_THROW(parse_trace_csv(bad), ParseError);
  // Extra field.
  std::string extra = text;
  extra.insert(extra.size() - 1, ",1");
  EXPECT_THROW(parse_trace_csv(extra), ParseError);
  // Missing metadata.
  const std::string no_meta = text.substr(text.find('\n') + 1);
  EXPECT_THROW(parse_trace_csv(no_meta), ParseError);
  EXPECT_THROW(parse_trace_csv(""), ParseError);
  EXPECT_THROW(read_trace_csv("/nonexistent/trace.csv"), IoError);
}

TEST(TraceCsv, IterationsToTolerance) {
  const auto f = fixture();
  const TraceTable t = table_for(f, Method::ista, 0.5, 200);
  for (double thr : {1e-2, 1e-6, 1e-10}) {
    const auto k = iterations_to_tolerance(t, thr);
    ASSERT_TRUE(k.has_value());
    EXPECT_LE(*t.rows[*k].gs_norm_sq, thr);
    for (std::size_t i = 0; i < *k; ++i) EXPECT_GT(*t.rows[i].gs_norm_sq, thr);
  }
  EXPECT_FALSE(iterations_to_tolerance(t, -1.0).has_value());
}

TEST(PlotData, SeriesAndEnvelope) {
  const auto f = fixture();
  const TraceTable t = table_for(f, Method::ista);
  const auto pts = plot_series(t, PlotSeries::gs, false);
  ASSERT_EQ(pts.size(), t.rows.size());
  EXPECT_EQ(pts[3].value, t.rows[3].gs_norm_sq);
  EXPECT_EQ(pts[3].envelope, t.rows[3].envelope_grad);
  const auto logs = plot_series(t, PlotSeries::gs, true);
  EXPECT_NEAR(*logs[3].value, std::log10(*t.rows[3].gs_norm_sq), 1e-15);
  const std::string csv = format_plot_data(pts);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,value,envelope");
  // Monotone in this run, as ISTA's |G_s| is nonincreasing.
  for (std::size_t i = 1; i < logs.size(); ++i) EXPECT_LE(*logs[i].value, *logs[i - 1].value + 1e-12);
}

TEST(PlotData, LyapunovAbsentForMomentumForm) {
  const auto f = fixture();
  const TraceTable t = table_for(f, Method::fista_momentum);
  EXPECT_THROW(plot_series(t, PlotSeries::lyapunov, false), InvalidArgument);
  const TraceTable ps = table_for(f, Method::fista_phase_space);
  EXPECT_NO_THROW(plot_series(ps, PlotSeries::lyapunov, true));
  EXPECT_FALSE(parse_plot_series("energy").has_value());
}

TEST(PlotData, ZeroBecomesEmptyOnLogScale) {
  SmoothOracle sm;
  sm.value = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  sm.gradient = [](const Vector& x) { return x; };
  sm.mu = 1.0;
  sm.lipschitz = 1.0;
  const CompositeProblem p(sm, zero_function(), 1);
  const auto ref = reference_solution(p, 1e-13);
  const auto trace = ista(p, Vector::Constant(1, 1.0), 1.0, StoppingRule{5, 0.0});
  const auto t = tabulate_trace(p, trace, ref, 1e-13);
  const auto obj = plot_series(t, PlotSeries::obj, false);
  EXPECT_EQ(*obj[1].value, 0.0);
  const auto lg = plot_series(t, PlotSeries::obj, true);
  EXPECT_FALSE(lg[1].value.has_value());
  const std::string csv = format_plot_data(lg);
  EXPECT_EQ(csv.find("inf"), std::string::npos);
  EXPECT_NE(csv.find("\n1,,"), std::string::npos);
}

TEST(Report, JsonShape) {
  const auto f = fixture();
  const auto trace = ista(f.problem, Vector::Zero(10), 0.5, StoppingRule{50, 0.0});
  const auto report = certify_trace(f.problem, trace, envelopes_for(f.problem, trace, f.ref), f.ref);
  const auto j = nlohmann::json::parse(report_to_json(report));
  for (const char* key : {"objective_envelope", "gradient_envelope", "lyapunov_decay"}) {
    ASSERT_TRUE(j.contains(key)) << key;
    for (const char* field : {"tested", "worst_slack", "worst_index", "pass"}) {
      EXPECT_TRUE(j[key].contains(field)) << key << "." << field;
    }
  }
  EXPECT_TRUE(j.contains("tolerance_policy"));
  EXPECT_EQ(j["reference_residual"].get<double>(), f.ref.residual);
  EXPECT_TRUE(j["passed"].get<bool>());
}
