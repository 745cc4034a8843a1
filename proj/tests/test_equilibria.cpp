#include <doctest.h>

#include <cmath>

#include "vaxsde/equilibria.hpp"

using namespace vaxsde;
using doctest::Approx;

namespace {

ModelParams fig1(double beta, double sigma1_sq) {
  ModelParams p;
  p.beta = beta;
  p.sigma1_sq = sigma1_sq;
  p.omega = 0.0015;
  p.delta = 0.0005;
  p.sigma2_sq = 0.0008;
  p.sigma3_sq = 0.0006;
  return p;
}

ModelParams fig3(double s2, double s3) {
  ModelParams p;
  p.beta = 100.0;
  p.sigma1_sq = 0.16;
  p.omega = 0.1;
  p.delta = 0.5;
  p.sigma2_sq = s2;
  p.sigma3_sq = s3;
  return p;
}

ModelParams fig5(double sigma1_sq) {
  ModelParams p;
  p.beta = 100.0;
  p.sigma1_sq = sigma1_sq;
  p.omega = 0.0004;
  p.delta = 0.00005;
  p.sigma2_sq = 0.0008;
  p.sigma3_sq = 0.0006;
  return p;
}

}  // namespace

TEST_CASE("reproduction numbers") {
  auto t = thresholds(fig1(31.0, 30.0));
  CHECK(t.r0 == Approx(1.87).epsilon(0.005 / 1.87));
  CHECK(t.r0s == Approx(0.98).epsilon(0.005 / 0.98));
  CHECK_FALSE(t.s_d);

  t = thresholds(fig1(33.3, 50.0));
  CHECK(t.r0 == Approx(2.0).epsilon(0.005));
  CHECK(t.r0s == Approx(0.8).epsilon(0.005 / 0.8));

  t = thresholds(fig5(13.0));
  CHECK(t.r0s == Approx(4.33).epsilon(0.005 / 4.33));
  REQUIRE(t.s_d);
  CHECK(std::abs(*t.s_d - 0.168) < 0.001);
  CHECK(*t.hit_s == Approx(1.0 - *t.s_d));
  CHECK(t.r0s <= t.r0);
  CHECK(*t.s_d >= 1.0 / t.r0);

  t = thresholds(fig5(0.0));
  CHECK(t.r0s == t.r0);
  CHECK(*t.s_d == 1.0 / t.r0);
}

TEST_CASE("s_d decreases to 1/R0 as the transmission noise vanishes") {
  double prev = 1.0;
  for (double s : {13.0, 1.0, 1e-2, 1e-4, 1e-8}) {
    const auto t = thresholds(fig5(s));
    CHECK(*t.s_d < prev);
    prev = *t.s_d;
  }
  CHECK(prev == Approx(1.0 / thresholds(fig5(0.0)).r0).epsilon(1e-9));
}

TEST_CASE("equilibrium report") {
  ModelParams p;
  p.delta = 0.3;
  p.omega = 0.3;
  auto r = equilibrium_report(p);
  REQUIRE(r.x3);
  CHECK(*r.x3 == Approx(1.0));
  CHECK(r.e1 == State{0, 0, 1});
  CHECK(r.e2 == State{1, 0, 0});

  r = equilibrium_report(fig1(31.0, 30.0));
  REQUIRE(r.x3);
  CHECK(*r.x3 < 0.0);
  CHECK_FALSE(r.e3);

  r = equilibrium_report(fig3(0.15, 0.2));
  REQUIRE(r.e4);
  CHECK(r.e4->S == Approx(0.166).epsilon(0.01));
  CHECK(r.e4->I == Approx(0.001004).epsilon(0.002));
  const auto d4 = drift(*r.e4, fig3(0.15, 0.2));
  CHECK(std::abs(d4.dS()) < 1e-12);
  CHECK(std::abs(d4.dI()) < 1e-12);
  CHECK(d4.dx() == 0.0);

  ModelParams low;
  low.beta = 10.0;
  CHECK_FALSE(equilibrium_report(low).e4);
  CHECK_FALSE(equilibrium_report(low).e5);
}

TEST_CASE("interior equilibria are drift equilibria") {
  ModelParams p = fig5(0.0);
  auto r = equilibrium_report(p);
  REQUIRE(r.e5);
  auto d = drift(*r.e5, p);
  CHECK(std::abs(d.dS()) < 1e-12);
  CHECK(std::abs(d.dI()) < 1e-12);
  CHECK(std::abs(d.dx()) < 1e-12);

  ModelParams q;
  q.kappa = 1.0;
  q.sigma2_sq = 0.2;
  q.sigma3_sq = 0.6;
  q.delta = 0.1;
  q.omega = 0.2;
  r = equilibrium_report(q);
  CHECK(r.in_r31);
  REQUIRE(r.e3);
  d = drift(*r.e3, q);
  CHECK(std::abs(d.dx()) < 1e-12);
  CHECK(r.e3->S + r.e3->x == Approx(1.0));
}

TEST_CASE("extinction conditions") {
  auto v = extinction_check(fig1(31.0, 30.0));
  CHECK(v.condition == ExtinctionCondition::CII);
  const auto t = thresholds(fig1(31.0, 30.0));
  const ModelParams p = fig1(31.0, 30.0);
  CHECK(*v.rate_bound == Approx(-(p.mu + p.gamma + 15.0) * (1.0 - t.r0s)));
  CHECK(*v.rate_bound < 0.0);

  v = extinction_check(fig1(33.3, 50.0));
  CHECK(v.condition == ExtinctionCondition::CI);
  CHECK(*v.rate_bound < 0.0);

  v = extinction_check(fig3(0.15, 0.2));
  CHECK(v.condition == ExtinctionCondition::None);
  CHECK_FALSE(v.rate_bound);
  for (const auto& c : v.checks) {
    CHECK(c.holds == make_inequality(c.text, c.lhs, c.relation, c.rhs).holds);
  }
}

TEST_CASE("logistic classifier") {
  auto v = logistic_classifier(fig3(1.5, 0.2), 1.0);
  CHECK(v.l_at_one == Approx(-0.6985));
  CHECK(v.classification == LogisticClass::ToZero);
  CHECK(logistic_classifier(fig3(1.5, 0.2), 0.0).classification == LogisticClass::ToZero);

  v = logistic_classifier(fig3(0.2, 1.5), 0.4);
  CHECK(v.l_at_one == Approx(1.4985));
  CHECK(v.classification == LogisticClass::ToOne);

  const auto e4 = *equilibrium_report(fig3(0.15, 0.2)).e4;
  CHECK(logistic_classifier(fig3(0.15, 0.2), e4.I).classification == LogisticClass::Bistable);
  CHECK_THROWS_AS(logistic_classifier(fig3(0.15, 0.2), 1.5), DomainError);
}

TEST_CASE("temporal mean bounds") {
  auto b = endemic_mean_bounds(fig5(0.0), 0.0);
  REQUIRE(b.i_mean_exact);
  ModelParams p = fig5(0.0);
  const double c = p.mu / (p.mu + p.gamma);
  CHECK(c == Approx(0.001204).epsilon(1e-3));
  CHECK(*b.i_mean_exact == Approx(0.001004).epsilon(1e-3));

  const auto t = thresholds(fig5(13.0));
  b = endemic_mean_bounds(fig5(13.0), 1.0 - 1.0 / t.r0s);
  CHECK(b.applicable);
  CHECK(b.i_mean_lower == 0.0);
  CHECK_FALSE(b.i_mean_lower_from_part2);

  const double x0 = 0.1;
  b = endemic_mean_bounds(fig5(13.0), x0);
  CHECK(b.i_mean_lower == Approx(c * (1 - 1 / t.r0s - x0)));
  REQUIRE(b.i_mean_upper);
  CHECK(*b.i_mean_upper == Approx(c * (100.0 / 87.0 * (1 - 1 / t.r0s) - x0)));
  CHECK(b.s_mean_lower >= p.mu * (1 - x0) / (p.mu + p.beta));
  CHECK_FALSE(b.i_mean_exact);

  b = endemic_mean_bounds(fig1(31.0, 30.0), 0.2);
  CHECK_FALSE(b.applicable);
  CHECK_FALSE(b.reason.empty());
}

TEST_CASE("pathwise bounds") {
  auto b = pathwise_bounds(fig5(0.0), 0.0, 0.0);
  REQUIRE(b.applicable);
  CHECK(b.s_d == 1.0 / thresholds(fig5(0.0)).r0);

  b = pathwise_bounds(fig5(13.0), 0.2, 0.4);
  CHECK(b.s_d == Approx(0.168).epsilon(0.01));
  CHECK(b.hit_s == Approx(1 - b.s_d));
  CHECK(b.s_sup_upper == Approx(0.8));
  CHECK(b.i_sup_lower <= b.i_inf_upper);
  CHECK_FALSE(b.full_uptake_degenerate);
  CHECK(pathwise_bounds(fig5(13.0), 0.2, 1.0).full_uptake_degenerate);
  CHECK_FALSE(pathwise_bounds(fig1(31.0, 30.0), 0.1, 0.2).applicable);
  CHECK_THROWS_AS(pathwise_bounds(fig5(13.0), 0.5, 0.4), DomainError);
}

TEST_CASE("deviation bound") {
  ModelParams p = fig5(0.0);
  const auto e5 = *equilibrium_report(p).e5;
  const auto d = deviation_bound(p, e5);
  const double half = 0.5 * p.kappa * p.sigma_sq();
  const double expected =
      (half * e5.x * (1 - e5.x) + e5.x + e5.S) / std::min(1.0, half - 2 * p.delta);
  CHECK(d.bound == Approx(expected).epsilon(1e-12));
  CHECK(d.eta == 0.0);
  CHECK(d.s_center == Approx(e5.S));

  // approaching the regime edge the bound blows up
  double prev = 0.0;
  for (double frac : {0.5, 0.9, 0.99, 0.999}) {
    ModelParams q = p;
    q.delta = frac * 0.25 * q.kappa * q.sigma_sq();
    const auto e = equilibrium_report(q).e5;
    if (!e) continue;
    const auto dq = deviation_bound(q, *e);
    CHECK(dq.bound > prev);
    prev = dq.bound;
  }

  ModelParams bad = p;
  bad.delta = 0.3 * bad.kappa * bad.sigma_sq();
  CHECK_THROWS_AS(deviation_bound(bad, e5), RegimeError);
  CHECK_THROWS_AS(deviation_bound(p, State{0.2, 0.01, 1.0}), RegimeError);
}
