#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "vaxsde/estimators.hpp"
#include "vaxsde/rank_stats.hpp"

using namespace vaxsde;
using doctest::Approx;

namespace {

Path synthetic(double t_end, std::size_t n, const std::function<State(double)>& f) {
  Path p;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = t_end * static_cast<double>(i) / static_cast<double>(n);
    p.times.push_back(t);
    p.states.push_back(f(t));
  }
  return p;
}

}  // namespace

TEST_CASE("time averages") {
  const Path constant = synthetic(10.0, 100, [](double) { return State{0.3, 0.1, 0.7}; });
  CHECK(time_average(constant, Field::S, 0.0) == Approx(0.3));
  CHECK(time_average(constant, Field::x, 4.37) == Approx(0.7));

  const Path ramp = synthetic(1.0, 64, [](double t) { return State{0.0, t, 0.0}; });
  CHECK(time_average(ramp, Field::I, 0.0) == Approx(0.5).epsilon(1e-14));
  // burn-in off the grid: mean of t on [0.3, 1]
  CHECK(time_average(ramp, Field::I, 0.3) == Approx(0.65).epsilon(1e-14));
  CHECK_THROWS_AS(time_average(ramp, Field::I, 1.0), DomainError);

  const Path offset = synthetic(2.0, 40, [](double) { return State{0.5, 0.2, 0.4}; });
  CHECK(squared_deviation_average(offset, State{0.4, 0.2, 0.2}, 0.0) == Approx(0.05));
}

TEST_CASE("growth rates of exact exponential and logistic paths") {
  const double c = 0.7;
  const Path decay = synthetic(20.0, 400, [&](double t) { return State{0.5, std::exp(-c * t), 0.5}; });
  auto fit = growth_rate(decay, Field::I, GrowthTransform::LogOverT);
  CHECK(fit.rate == Approx(-c).epsilon(1e-10));
  CHECK(fit.r_squared == Approx(1.0));
  CHECK_FALSE(fit.truncated);

  const Path logistic = synthetic(10.0, 200, [&](double t) { return State{0.5, 0.1, 1.0 / (1.0 + std::exp(-c * t))}; });
  fit = growth_rate(logistic, Field::x, GrowthTransform::LogitOverT);
  CHECK(fit.rate == Approx(c).epsilon(1e-9));

  // absorbed tail is excluded from the fit
  const Path absorbed = synthetic(10.0, 100, [&](double t) { return State{0.5, t < 6.0 ? std::exp(-c * t) : 0.0, 0.5}; });
  fit = growth_rate(absorbed, Field::I, GrowthTransform::LogOverT);
  CHECK(fit.truncated);
  CHECK(fit.rate == Approx(-c).epsilon(1e-9));
  CHECK(fit.t_end < 6.0);

  const Path dead = synthetic(1.0, 10, [](double t) { return State{0.5, t < 0.15 ? 0.1 : 0.0, 0.5}; });
  CHECK_THROWS_AS(growth_rate(dead, Field::I, GrowthTransform::LogOverT), DomainError);
}

TEST_CASE("tail extrema") {
  const Path rising = synthetic(10.0, 500, [](double t) { return State{0.0, 0.0, 1.0 - std::exp(-t)}; });
  auto est = tail_extrema(rising, Field::x);
  CHECK(est.value_sup == rising.terminal().x);
  CHECK(est.value_inf == rising.terminal().x);

  const double a = 0.4, b = 0.1;
  const Path wave = synthetic(400.0, 40000, [&](double t) { return State{a + b * std::sin(t), 0.0, 0.0}; });
  est = tail_extrema(wave, Field::S);
  CHECK(est.converged);
  CHECK(est.value_inf == Approx(a - b).epsilon(1e-4));
  CHECK(est.value_sup == Approx(a + b).epsilon(1e-4));
  CHECK(est.value_inf <= est.value_sup);
  CHECK(est.window_begin < est.window_end);

  TailOptions bad;
  bad.window_lo = 0.8;
  bad.window_hi = 0.2;
  CHECK_THROWS_AS(tail_extrema(wave, Field::S, bad), DomainError);
}

TEST_CASE("absorption counting") {
  Path p;
  p.times = {0.0, 1.0};
  p.states = {State{0.5, 0.1, 0.5}, State{0.5, 0.1, 0.3}};
  CHECK(counts_toward_zero(p));
  CHECK_FALSE(counts_toward_zero(p, 0.2));
  p.absorbed_x = XAbsorption::AtOne;
  CHECK_FALSE(counts_toward_zero(p));
  p.absorbed_x = XAbsorption::AtZero;
  CHECK(counts_toward_zero(p, 0.0));
}

TEST_CASE("absorption sweep corners and determinism") {
  SweepSetup setup;
  setup.base.beta = 100.0;
  setup.base.sigma1_sq = 0.16;
  setup.base.omega = 0.1;
  setup.base.delta = 0.5;
  setup.config.t_end = 30.0;
  setup.config.dt = 1e-3;
  setup.config.stop_when_x_absorbed = true;
  setup.config.record_stride = 1000000;
  setup.n_per_cell = 40;
  setup.master_seed = 7;
  const AbsorptionGrid grid{{2.0, 0.1}, {0.1, 2.0}, {0.1, 0.9}};
  const auto table = absorption_sweep(setup, grid, Execution::Parallel);
  REQUIRE(table.cells.size() == 8);
  CHECK(table.at(0, 0, 0).p_hat > 0.9);  // sigma2^2 >> sigma3^2, x0 = 0.1
  CHECK(table.at(1, 1, 1).p_hat < 0.1);  // sigma3^2 >> sigma2^2, x0 = 0.9
  for (std::size_t c = 0; c < table.cells.size(); ++c) {
    const auto& cell = table.cells[c];
    CHECK(cell.first_stream == c * setup.n_per_cell);
    CHECK(cell.p_hat >= 0.0);
    CHECK(cell.p_hat <= 1.0);
    CHECK(cell.se == Approx(std::sqrt(cell.p_hat * (1 - cell.p_hat) / 40.0)));
  }
  const auto serial = absorption_sweep(setup, grid, Execution::Serial);
  for (std::size_t c = 0; c < table.cells.size(); ++c) CHECK(serial.cells[c].to_zero == table.cells[c].to_zero);

  std::vector<bool> skip(8, true);
  skip[5] = false;
  const auto one = absorption_sweep(setup, grid, Execution::Parallel, &skip);
  CHECK(one.cells[5].to_zero == table.cells[5].to_zero);
  CHECK(one.cells[4].n == 0);

  CHECK_THROWS_AS(absorption_sweep(setup, AbsorptionGrid{}, Execution::Serial), DomainError);
}

TEST_CASE("average ranks with ties") {
  const std::vector<double> v = {3.0, 1.0, 4.0, 1.0, 5.0};
  CHECK(average_ranks(v) == std::vector<double>{3.0, 1.5, 4.0, 1.5, 5.0});
}

TEST_CASE("spearman correlation") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> down = {9, 7, 5, 3, 1};
  auto r = spearman(x, down, Alternative::Decreasing);
  CHECK(r.rho == Approx(-1.0));
  CHECK(r.exact);
  CHECK(r.p_value == Approx(1.0 / 120.0));
  CHECK(spearman(x, down, Alternative::Increasing).p_value == Approx(1.0));
  CHECK(spearman(x, down, Alternative::TwoSided).p_value == Approx(2.0 / 120.0));

  std::vector<double> a, b;
  for (int i = 0; i < 30; ++i) {
    a.push_back(i);
    b.push_back(i + 5.0 * std::sin(1.7 * i));
  }
  r = spearman(a, b, Alternative::Increasing);
  CHECK_FALSE(r.exact);
  CHECK(r.rho > 0.8);
  CHECK(r.p_value < 1e-6);
  CHECK_THROWS(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}, Alternative::Increasing));
}
