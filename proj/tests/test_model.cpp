#include <doctest.h>

#include <cmath>

#include "vaxsde/model.hpp"

using namespace vaxsde;
using doctest::Approx;

TEST_CASE("payoffs at the corners") {
  ModelParams p;
  p.omega = 0.1;
  p.delta = 0.5;
  auto v = payoffs(1.0, 0.0, p);
  CHECK(v.v12 == Approx(0.4));
  CHECK(v.v21 == Approx(0.0));
  v = payoffs(0.0, 0.5, p);
  CHECK(v.v12 == Approx(-0.1));
  CHECK(v.v21 == Approx(0.0));
  p.omega = 2.0;
  p.delta = 0.1;
  v = payoffs(0.5, 0.2, p);
  CHECK(v.v12 == Approx(-1.95));
  CHECK(v.v21 == Approx(-0.15));
}

TEST_CASE("replicator drift through payoffs matches the direct form") {
  ModelParams p;
  p.omega = 0.3;
  p.delta = 0.2;
  p.sigma2_sq = 0.4;
  p.sigma3_sq = 0.9;
  for (double x : {0.1, 0.35, 0.8}) {
    for (double I : {0.0, 0.05, 0.3}) {
      const auto d = drift(State{0.4, I, x}, p);
      CHECK(replicator_drift_from_payoffs(x, I, p) == Approx(d.dx()).epsilon(1e-12));
    }
  }
}

TEST_CASE("drift vanishes at the disease-free corners") {
  ModelParams p;
  p.omega = 0.7;
  p.delta = 0.3;
  p.sigma1_sq = 2.0;
  p.sigma2_sq = 0.5;
  p.sigma3_sq = 0.1;
  for (State e : {State{0, 0, 1}, State{1, 0, 0}}) {
    const auto d = drift(e, p);
    CHECK(d.dS() == 0.0);
    CHECK(d.dI() == 0.0);
    CHECK(d.dx() == 0.0);
  }
}

TEST_CASE("drift of S and I vanishes at the endemic no-uptake point") {
  ModelParams p;
  p.beta = 100.0;
  const double r0 = p.beta / (p.mu + p.gamma);
  const State e4{1.0 / r0, p.mu / (p.mu + p.gamma) * (1.0 - 1.0 / r0), 0.0};
  const auto d = drift(e4, p);
  CHECK(std::abs(d.dS()) < 1e-12);
  CHECK(std::abs(d.dI()) < 1e-12);
}

TEST_CASE("diffusion columns") {
  ModelParams p;
  p.sigma1_sq = 4.0;
  p.sigma2_sq = 0.5;
  p.sigma3_sq = 0.5;
  p.kappa = 2.0;
  const auto g = diffusion(State{0.5, 0.5, 0.5}, p);
  CHECK(g(0, 0) == Approx(-0.5));
  CHECK(g(1, 0) == Approx(0.5));
  CHECK(g(2, 0) == 0.0);
  CHECK(g(0, 1) == 0.0);
  CHECK(g(1, 1) == 0.0);
  CHECK(g(2, 1) == Approx(0.5));

  const auto no_infection = diffusion(State{0.5, 0.0, 0.5}, p);
  for (int r = 0; r < 3; ++r) CHECK(no_infection(r, 0) == 0.0);
  for (double x : {0.0, 1.0}) {
    const auto absorbed = diffusion(State{0.5, 0.2, x}, p);
    for (int r = 0; r < 3; ++r) CHECK(absorbed(r, 1) == 0.0);
  }
}

TEST_CASE("diffusion jacobian against central differences") {
  ModelParams p;
  p.sigma1_sq = 3.0;
  p.sigma2_sq = 0.7;
  p.sigma3_sq = 0.4;
  const State y{0.3, 0.2, 0.7};
  const auto J = diffusion_state_jacobian(y, p);
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    Vec3 up = to_vec(y), dn = to_vec(y);
    up[j] += h;
    dn[j] -= h;
    const auto gu = diffusion(to_state(up), p), gd = diffusion(to_state(dn), p);
    for (int k = 0; k < 2; ++k) {
      for (int i = 0; i < 3; ++i) {
        const double fd = (gu(i, k) - gd(i, k)) / (2 * h);
        CHECK(J[k][i][j] == Approx(fd).epsilon(1e-6).scale(1.0));
      }
    }
  }
  // symmetric point of the logistic factor
  const auto Jm = diffusion_state_jacobian(State{0.3, 0.2, 0.5}, p);
  for (int i = 0; i < 3; ++i) CHECK(Jm[1][i][2] == 0.0);
  // linear in S
  const double s1 = std::sqrt(p.sigma1_sq);
  CHECK(J[0][0][0] == Approx(-s1 * y.I));
  CHECK(J[0][1][0] == Approx(s1 * y.I));
  CHECK(J[0][2][0] == 0.0);
}

TEST_CASE("parameter and state validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = ModelParams{};
  p.sigma2_sq = -1e-3;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("sigma2_sq"), DomainError);
  p = ModelParams{};
  p.omega = std::nan("");
  CHECK_THROWS_AS(p.validate(), DomainError);

  CHECK(domain_violation(State{0.5, 0.5, 1.0}) == 0.0);
  CHECK(domain_violation(State{0.6, 0.5, 0.5}) == Approx(0.1));
  CHECK(domain_violation(State{-0.2, 0.1, 0.5}) == Approx(0.2));
  CHECK_THROWS_AS(require_in_domain(State{0.2, 0.2, 1.5}), DomainError);
  CHECK_NOTHROW(require_in_domain(State{0.2, 0.2, 1.0}));
}
