#include "vaxsde/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vaxsde {

const char* to_string(Field f) {
  switch (f) {
    case Field::S: return "S";
    case Field::I: return "I";
    default: return "x";
  }
}

double field_value(const State& s, Field f) {
  switch (f) {
    case Field::S: return s.S;
    case Field::I: return s.I;
    default: return s.x;
  }
}

namespace {

template <class Value>
double windowed_trapezoid(const Path& path, double burn_in, Value&& value) {
  const auto& t = path.times;
  if (t.size() < 2 || !(burn_in < t.back())) {
    throw DomainError("time average window is empty");
  }
  const double start = std::max(burn_in, t.front());
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double a = t[k], b = t[k + 1];
    if (b <= start) continue;
    const double ya = value(path.states[k]), yb = value(path.states[k + 1]);
    if (a >= start) {
      integral += 0.5 * (ya + yb) * (b - a);
    } else {
      const double w = (start - a) / (b - a);
      const double y_start = ya + w * (yb - ya);
      integral += 0.5 * (y_start + yb) * (b - start);
    }
  }
  return integral / (t.back() - start);
}

}  // namespace

double time_average(const Path& path, Field field, double burn_in) {
  return windowed_trapezoid(path, burn_in, [field](const State& s) { return field_value(s, field); });
}

double squared_deviation_average(const Path& path, const State& c, double burn_in) {
  return windowed_trapezoid(path, burn_in, [&c](const State& s) {
    return (s.S - c.S) * (s.S - c.S) + (s.I - c.I) * (s.I - c.I) + (s.x - c.x) * (s.x - c.x);
  });
}

GrowthRateFit growth_rate(const Path& path, Field field, GrowthTransform transform) {
  auto transformed = [&](const State& s) {
    const double y = field_value(s, field);
    if (transform == GrowthTransform::LogOverT) {
      return y > 0.0 ? std::log(y) : std::numeric_limits<double>::quiet_NaN();
    }
    return (y > 0.0 && y < 1.0) ? std::log(y / (1.0 - y)) : std::numeric_limits<double>::quiet_NaN();
  };

  // valid prefix: up to the first sample outside the transform's domain
  std::size_t valid = 0;
  while (valid < path.states.size() && std::isfinite(transformed(path.states[valid]))) ++valid;

  GrowthRateFit fit;
  fit.truncated = valid < path.states.size();
  if (valid < 3) throw DomainError("growth rate needs at least three valid samples");

  const std::size_t first = valid / 2;
  const std::size_t n = valid - first;
  double st = 0.0, sy = 0.0;
  for (std::size_t k = first; k < valid; ++k) {
    st += path.times[k];
    sy += transformed(path.states[k]);
  }
  const double mt = st / n, my = sy / n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k = first; k < valid; ++k) {
    const double dt = path.times[k] - mt;
    const double dy = transformed(path.states[k]) - my;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  fit.rate = sty / stt;
  fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
  fit.points = n;
  fit.t_begin = path.times[first];
  fit.t_end = path.times[valid - 1];
  return fit;
}

TailEstimate tail_extrema(const Path& path, Field field, const TailOptions& options) {
  const std::size_t N = path.states.size();
  if (N < 8) throw DomainError("tail extrema need at least 8 samples");
  if (!(0.0 <= options.window_lo && options.window_lo < options.window_hi &&
        options.window_hi <= 1.0)) {
    throw DomainError("tail window must satisfy 0 <= lo < hi <= 1");
  }

  // k indexes the reversed sequence: k = 0 is the last sample
  auto sample = [&](std::size_t k) { return field_value(path.states[N - 1 - k], field); };
  const auto k_lo = static_cast<std::size_t>(options.window_lo * static_cast<double>(N - 1));
  const auto k_hi = static_cast<std::size_t>(options.window_hi * static_cast<double>(N - 1));

  double run_max = sample(0), run_min = sample(0);
  double max_lo = run_max, min_lo = run_min;
  bool non_decreasing = true, non_increasing = true;  // in forward time over [0, k_hi]
  for (std::size_t k = 1; k <= k_hi; ++k) {
    const double y = sample(k);
    const double later = sample(k - 1);
    if (y > later) non_decreasing = false;
    if (y < later) non_increasing = false;
    run_max = std::max(run_max, y);
    run_min = std::min(run_min, y);
    if (k == k_lo) {
      max_lo = run_max;
      min_lo = run_min;
    }
  }

  TailEstimate est;
  est.window_begin = path.times[N - 1 - k_hi];
  est.window_end = path.times[N - 1 - k_lo];

  auto flat = [&](double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
    return std::abs(a - b) <= options.flat_tolerance * scale;
  };
  est.converged = flat(max_lo, run_max) && flat(min_lo, run_min);

  if (!est.converged && (non_decreasing || non_increasing)) {
    // a monotone bounded tail has a limit; the latest value estimates it
    est.value_inf = est.value_sup = sample(0);
  } else {
    est.value_inf = min_lo;
    est.value_sup = max_lo;
  }
  return est;
}

bool counts_toward_zero(const Path& path, double terminal_threshold) {
  if (path.absorbed_x) return *path.absorbed_x == XAbsorption::AtZero;
  return path.terminal().x < terminal_threshold;
}

AbsorptionTable absorption_sweep(const SweepSetup& setup, const AbsorptionGrid& grid,
                                 Execution exec, const std::vector<bool>* skip) {
  if (grid.cells() == 0) throw DomainError("absorption grid is empty");
  if (setup.n_per_cell < 1) throw DomainError("n_per_cell must be >= 1");
  if (skip && skip->size() != grid.cells()) throw DomainError("skip mask size mismatch");

  AbsorptionTable table;
  table.grid = grid;
  table.master_seed = setup.master_seed;
  table.cells.resize(grid.cells());
  for (std::size_t i2 = 0, c = 0; i2 < grid.sigma2_sq.size(); ++i2) {
    for (std::size_t i3 = 0; i3 < grid.sigma3_sq.size(); ++i3) {
      for (std::size_t ix = 0; ix < grid.x0.size(); ++ix, ++c) {
        auto& cell = table.cells[c];
        cell.sigma2_sq = grid.sigma2_sq[i2];
        cell.sigma3_sq = grid.sigma3_sq[i3];
        cell.x0 = grid.x0[ix];
        cell.first_stream = static_cast<std::uint64_t>(c) * setup.n_per_cell;
      }
    }
  }

  IntegratorConfig config = setup.config;
  config.record_stride = std::max<std::size_t>(config.record_stride, config.steps());
  config.record_drivers = false;
  config.stop_when_x_absorbed = true;

  // one work item per (cell, trial); failures are confined to their cell
  const std::size_t n = setup.n_per_cell;
  std::vector<std::size_t> items;
  for (std::size_t c = 0; c < table.cells.size(); ++c) {
    if (skip && (*skip)[c]) continue;
    for (std::size_t k = 0; k < n; ++k) items.push_back(c * n + k);
  }

  struct Outcome {
    bool to_zero = false;
    std::string error;
  };
  const auto outcomes = indexed_map(items.size(), exec, [&](std::size_t w) {
    const std::size_t c = items[w] / n;
    const auto& cell = table.cells[c];
    Outcome out;
    try {
      ModelParams p = setup.base;
      p.sigma2_sq = cell.sigma2_sq;
      p.sigma3_sq = cell.sigma3_sq;
      const State init{setup.S0, setup.I0, cell.x0};
      const Path path = simulate(init, p, nullptr, config,
                                 RandomStream(setup.master_seed, static_cast<std::uint64_t>(items[w])));
      out.to_zero = counts_toward_zero(path, setup.terminal_threshold);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    return out;
  });

  for (std::size_t w = 0; w < items.size(); ++w) {
    auto& cell = table.cells[items[w] / n];
    if (!outcomes[w].error.empty()) {
      if (cell.error.empty()) cell.error = outcomes[w].error;
      continue;
    }
    ++cell.n;
    if (outcomes[w].to_zero) ++cell.to_zero;
  }
  for (auto& cell : table.cells) {
    if (!cell.error.empty() || cell.n == 0) continue;
    cell.p_hat = static_cast<double>(cell.to_zero) / static_cast<double>(cell.n);
    cell.se = std::sqrt(cell.p_hat * (1.0 - cell.p_hat) / static_cast<double>(cell.n));
  }
  return table;
}

}  // namespace vaxsde
