#include <gtest/gtest.h>

#include <limits>

#include "oracles.hpp"
#include "proxcert/certify.hpp"
#include "proxcert/errors.hpp"
#include "proxcert/instances.hpp"
#include "proxcert/prox.hpp"

using namespace proxcert;

TEST(Envelopes, IstaExamples) {
  // mu = 1, s = 1/3: rho = (2/3) / (4/3) = 1/2.
  const auto e = ista_envelopes(1.0 / 3.0, 1.0, 3.0, 2.0);
  EXPECT_NEAR(e.objective.ratio, 0.5, 1e-15);
  EXPECT_NEAR(e.objective.constant, 6.0, 1e-14);
  EXPECT_NEAR(e.gradient.constant, 72.0, 1e-12);
  EXPECT_NEAR(e.objective.evaluate(3), 6.0 / 8.0, 1e-14);

  // s = 1/L: rho = (L - mu) / (L + mu), C_obj = L D, C_grad = 4 L^2 D.
  const double L = 7.0;
  const double mu = 0.5;
  const auto f = ista_envelopes(1.0 / L, mu, L, 3.0);
  EXPECT_NEAR(f.objective.ratio, (L - mu) / (L + mu), 1e-15);
  EXPECT_NEAR(f.objective.constant, L * 3.0, 1e-13);
  EXPECT_NEAR(f.gradient.constant, 4 * L * L * 3.0, 1e-11);

  // mu = 0: no decay.
  const auto g = ista_envelopes(0.1, 0.0, 1.0, 1.0);
  EXPECT_EQ(g.objective.ratio, 1.0);
  EXPECT_EQ(g.objective.evaluate(1000), g.objective.evaluate(0));

  EXPECT_THROW(ista_envelopes(2.0 / L, mu, L, 1.0), TheoremRangeError);
  EXPECT_THROW(ista_envelopes(0.0, mu, L, 1.0), InvalidArgument);
}

TEST(Envelopes, FistaExamples) {
  // mu = 1, s = 1/16: sqrt(mu s) = 1/4, decay 16/17 per step.
  const auto e = fista_envelopes(1.0 / 16.0, 1.0, 4.0, 2.0, 1.0);
  EXPECT_NEAR(e.objective.evaluate(1) / e.objective.evaluate(0), 16.0 / 17.0, 1e-15);
  EXPECT_NEAR(e.objective.constant, 3.0, 1e-15);
  ASSERT_TRUE(e.gradient.has_value());
  EXPECT_NEAR(e.gradient->constant, 2.0 * 3.0 / ((1.0 / 16.0) * 0.75), 1e-12);
  EXPECT_NEAR(e.simplified_objective.constant, 11.0 * 16.0 / 2.0, 1e-12);
  EXPECT_NEAR(e.simplified_gradient->constant, 11.0 * 256.0 / 0.75, 1e-9);

  // s = 1/L: objective only, the gradient bound is singular.
  const double L = 5.0;
  const auto f = fista_envelopes(1.0 / L, 0.2, L, 1.0, 2.0);
  EXPECT_TRUE(f.gradient_singular);
  EXPECT_FALSE(f.gradient.has_value());
  EXPECT_FALSE(f.simplified_gradient.has_value());
  EXPECT_NEAR(f.simplified_objective.constant, 11.0 * L * 2.0 / 2.0, 1e-12);
  EXPECT_NEAR(f.simplified_objective.beta, 0.25 * std::sqrt(0.2 / L), 1e-15);
  EXPECT_THROW(fista_envelopes(1.1 / L, 0.2, L, 1.0, 2.0), TheoremRangeError);
}

TEST(Envelopes, MonotoneWhenRatioAtMostOne) {
  const auto e = RateEnvelope::power(3.0, 0.9);
  const auto f = RateEnvelope::inverse_power(3.0, 0.1);
  for (std::size_t k = 0; k < 200; ++k) {
    EXPECT_LE(e.evaluate(k + 1), e.evaluate(k));
    EXPECT_LE(f.evaluate(k + 1), f.evaluate(k));
  }
  EXPECT_THROW(RateEnvelope::power(1.0, 1.5), InvalidArgument);
  EXPECT_THROW(RateEnvelope::power(1.0, -0.5), InvalidArgument);
  EXPECT_EQ(RateEnvelope::power(2.0, 0.0).evaluate(0), 2.0);
  EXPECT_EQ(RateEnvelope::power(2.0, 0.0).evaluate(1), 0.0);
  EXPECT_THROW(RateEnvelope::power(-1.0, 0.5), InvalidArgument);
  EXPECT_THROW(RateEnvelope::inverse_power(1.0, -0.1), InvalidArgument);
}

TEST(Lyapunov, MinFactorIsAlwaysTheQuarter) {
  for (double mu : {1e-9, 1e-4, 0.1, 1.0, 10.0}) {
    for (double s : {1e-3, 0.05, 0.1, 1.0}) {
      const double a = std::sqrt(mu * s);
      EXPECT_DOUBLE_EQ(fista_lyapunov_min_factor(mu, s), a / 4.0);
    }
  }
}

namespace {

struct WellConditioned {
  CompositeProblem problem;
  double s;
  ReferenceSolution ref;
};

WellConditioned well_conditioned(std::uint64_t seed) {
  auto p = build_random_lasso(30, 20, 0.1, 1.0, seed, 0.05);
  auto ref = reference_solution(p, 1e-13);
  return {std::move(p), 0.5, std::move(ref)};
}

}  // namespace

TEST(Lyapunov, InitialValues) {
  auto w = well_conditioned(1);
  const Vector x0 = Vector::Ones(20);
  const auto ist = ista(w.problem, x0, w.s, StoppingRule{5, 0.0});
  EXPECT_DOUBLE_EQ(ista_lyapunov(ist, w.ref.x)[0], (x0 - w.ref.x).squaredNorm());
  const auto ps = fista_phase_space(w.problem, x0, w.s, StoppingRule{5, 0.0});
  const double e0 = fista_lyapunov(w.problem, ps, w.ref.x, w.ref.phi)[0];
  const double want = w.problem.objective(x0) - w.ref.phi + w.problem.mu() * (x0 - w.ref.x).squaredNorm();
  EXPECT_NEAR(e0, want, 1e-12 * want);
  const auto mom = fista_momentum(w.problem, x0, w.s, StoppingRule{5, 0.0});
  EXPECT_THROW(fista_lyapunov(w.problem, mom, w.ref.x, w.ref.phi), InvalidArgument);
  EXPECT_THROW(ista_lyapunov(mom, w.ref.x), InvalidArgument);
}

TEST(Lyapunov, RestStateHasZeroEnergy) {
  auto w = well_conditioned(2);
  const auto ps = fista_phase_space(w.problem, w.ref.x, w.s, StoppingRule{1, 0.0});
  const auto e = fista_lyapunov(w.problem, ps, w.ref.x, w.ref.phi);
  EXPECT_NEAR(e[0], 0.0, 1e-15);
}

TEST(Inequalities, StrongGapAtAndAwayFromTheMinimizer) {
  auto w = well_conditioned(3);
  EXPECT_NEAR(check_strong_gap(w.problem, w.ref.x, w.ref.x, w.ref.phi).slack, 0.0, 1e-15);
  for (unsigned i = 0; i < 20; ++i) {
    const Vector x = w.ref.x + oracle::random_vector(20, 300 + i);
    const auto sl = check_strong_gap(w.problem, x, w.ref.x, w.ref.phi);
    EXPECT_GE(sl.slack, -1e-8 * sl.scale);
  }
}

TEST(Inequalities, PivotalStrongFormIsTighter) {
  auto w = well_conditioned(4);
  for (unsigned i = 0; i < 50; ++i) {
    const Vector x = oracle::random_vector(20, 400 + i, 2.0);
    const Vector y = oracle::random_vector(20, 500 + i, 2.0);
    for (double s : {0.25, 0.5, 1.0}) {
      const auto strong = check_pivotal(w.problem, x, y, s);
      const auto convex = check_pivotal(w.problem, x, y, s, 0.0);
      EXPECT_GE(strong.slack, -1e-8 * strong.scale);
      EXPECT_LE(strong.slack, convex.slack);
    }
  }
}

TEST(Inequalities, PivotalSmoothConvexCase) {
  // g == 0, mu = 0: f(y - s grad f(y)) <= f(x) + <grad f(y), y - x> - (s - s^2 L / 2)|grad f(y)|^2.
  const Matrix a = oracle::random_matrix(6, 6, 50);
  const Vector b = oracle::random_vector(6, 51);
  const auto ex = oracle::gram_eigen_extremes(a);
  const auto p = make_lasso(LinearOperator::dense(a), b, 0.0, 0.0, ex.max);
  const oracle::Lasso o{a, b, 0.0};
  const Vector x = oracle::random_vector(6, 52);
  const Vector y = oracle::random_vector(6, 53);
  const double s = 0.7 / ex.max;
  const Vector g = o.grad(y);
  const double want = o.f(x) + g.dot(y - x) - (s - s * s * ex.max / 2) * g.squaredNorm() - o.f(y - s * g);
  EXPECT_NEAR(check_pivotal(p, x, y, s).slack, want, 1e-10 * (1.0 + std::abs(want)));
}

TEST(Certify, IstaAndFistaTracesPass) {
  auto w = well_conditioned(5);
  for (Method m : {Method::ista, Method::fista_momentum, Method::fista_phase_space}) {
    const auto trace = solve(m, w.problem, Vector::Zero(20), w.s, StoppingRule{1000, 0.0});
    const auto report = certify_trace(w.problem, trace, envelopes_for(w.problem, trace, w.ref), w.ref);
    EXPECT_TRUE(report.certifiable);
    EXPECT_TRUE(report.passed()) << to_string(m);
    EXPECT_NE(report.find("objective_envelope"), nullptr);
    EXPECT_NE(report.find("gradient_envelope"), nullptr);
    EXPECT_NE(report.find("pivotal (step-scaled)"), nullptr);
    if (m == Method::ista) EXPECT_NE(report.find("lyapunov_decay"), nullptr);
    if (m == Method::fista_phase_space) {
      EXPECT_NE(report.find("lyapunov_decay_min_factor"), nullptr);
      EXPECT_NE(report.find("lyapunov_decay_quarter"), nullptr);
    }
  }
}

TEST(Certify, OneStepConvergedTrace) {
  SmoothOracle f;
  f.value = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  f.gradient = [](const Vector& x) { return x; };
  f.mu = 1.0;
  f.lipschitz = 1.0;
  const CompositeProblem p(f, zero_function(), 1);
  const auto trace = ista(p, Vector::Constant(1, 2.0), 1.0, StoppingRule{10, 0.0});
  const auto ref = reference_solution(p, 1e-13);
  const auto report = certify_trace(p, trace, envelopes_for(p, trace, ref), ref);
  EXPECT_TRUE(report.passed());
}

TEST(Certify, UncertifiableTraces) {
  auto w = well_conditioned(6);
  const auto big = ista(w.problem, Vector::Zero(20), 1.5, StoppingRule{50, 0.0});
  const auto r1 = certify_trace(w.problem, big, envelopes_for(w.problem, big, w.ref), w.ref);
  EXPECT_FALSE(r1.certifiable);
  EXPECT_FALSE(r1.passed());
  EXPECT_TRUE(r1.checks.empty());

  const auto div = ista(w.problem, Vector::Zero(20), 3.0, StoppingRule{100000, 0.0});
  ASSERT_TRUE(div.diverged());
  const auto r2 = certify_trace(w.problem, div, {}, w.ref);
  EXPECT_FALSE(r2.certifiable);
  EXPECT_NE(r2.note.find("diverged"), std::string::npos);
}

TEST(Certify, TooSmallEnvelopeFailsWithNegativeSlack) {
  auto w = well_conditioned(7);
  const auto trace = ista(w.problem, Vector::Zero(20), w.s, StoppingRule{100, 0.0});
  TraceEnvelopes env = envelopes_for(w.problem, trace, w.ref);
  env.objective = RateEnvelope::power(env.objective->constant * 1e-6, env.objective->ratio);
  const auto report = certify_trace(w.problem, trace, env, w.ref);
  const CheckResult* c = report.find("objective_envelope");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->pass);
  EXPECT_LT(c->worst_slack, 0.0);
  EXPECT_FALSE(report.passed());
}

TEST(Certify, NanIsAFailure) {
  auto w = well_conditioned(8);
  auto trace = ista(w.problem, Vector::Zero(20), w.s, StoppingRule{20, 0.0});
  trace.records[5].gs_norm_sq = std::numeric_limits<double>::quiet_NaN();
  const auto report = certify_trace(w.problem, trace, envelopes_for(w.problem, trace, w.ref), w.ref);
  const CheckResult* c = report.find("gradient_envelope");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->pass);
  EXPECT_EQ(c->worst_index, 5u);
}

TEST(Certify, MuZeroIstaIsABoundednessCheck) {
  const Matrix a = oracle::random_matrix(4, 6, 70);  // wide: A^T A is singular
  const Vector b = oracle::random_vector(4, 71);
  const auto ex = oracle::gram_eigen_extremes(a);
  const auto p = make_lasso(LinearOperator::dense(a), b, 0.1, 0.0, ex.max);
  const auto ref = reference_solution(p, 1e-10, 200000);
  const auto trace = ista(p, Vector::Zero(6), 1.0 / ex.max, StoppingRule{300, 0.0});
  const auto env = envelopes_for(p, trace, ref);
  EXPECT_EQ(env.objective->ratio, 1.0);
  const auto report = certify_trace(p, trace, env, ref);
  EXPECT_TRUE(report.passed());
}

TEST(Certify, FillObjectiveGaps) {
  auto w = well_conditioned(9);
  auto trace = ista(w.problem, Vector::Zero(20), w.s, StoppingRule{3, 0.0});
  fill_objective_gaps(w.problem, trace, w.ref.phi);
  EXPECT_DOUBLE_EQ(*trace.records[0].objective_gap_x, w.problem.objective(Vector::Zero(20)) - w.ref.phi);
}
