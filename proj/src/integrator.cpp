#include "vaxsde/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace vaxsde {

const char* to_string(Scheme s) {
  return s == Scheme::Milstein ? "milstein" : "euler_maruyama";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "milstein") return Scheme::Milstein;
  if (name == "euler_maruyama" || name == "euler-maruyama" || name == "em") {
    return Scheme::EulerMaruyama;
  }
  throw DomainError("unknown integration scheme '" + name + "'");
}

void IntegratorConfig::validate() const {
  if (!(std::isfinite(dt) && dt > 0.0)) throw DomainError("integrator dt must be > 0");
  if (!(std::isfinite(t_end) && t_end >= dt)) throw DomainError("integrator t_end must be >= dt");
  if (record_stride < 1) throw DomainError("integrator record_stride must be >= 1");
  if (!(std::isfinite(clamp_epsilon) && clamp_epsilon >= 0.0 && clamp_epsilon < 0.5)) {
    throw DomainError("integrator clamp_epsilon must lie in [0, 0.5)");
  }
}

std::size_t IntegratorConfig::steps() const {
  // tolerate representation error in t_end / dt
  return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

ControlSchedule::ControlSchedule(double dt, std::vector<double> values)
    : dt_(dt), values_(std::move(values)) {
  if (!(dt > 0.0)) throw DomainError("control schedule dt must be > 0");
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("control values must lie in [0,1]");
  }
}

ControlSchedule ControlSchedule::constant(double dt, std::size_t steps, double value) {
  return ControlSchedule(dt, std::vector<double>(steps, value));
}

double ControlSchedule::at_time(double t) const {
  if (values_.empty() || t <= 0.0) return values_.empty() ? 0.0 : values_.front();
  // small slack so grid points map to their own interval
  const auto n = static_cast<std::size_t>(std::floor(t / dt_ + 1e-9));
  return at_step(n);
}

Vec3 step_unprojected(const State& s, const ModelParams& p, double u, Increment dW, Scheme scheme,
                      double dt, std::size_t step_index) {
  const Vec3 y = to_vec(s);
  const detail::NoiseScales noise(p);
  const Vec3 f = detail::drift(y, p, u);
  const auto G = detail::diffusion(y, noise);
  const std::array<double, 2> w{dW.dW1, dW.dW2};

  Vec3 out{};
  for (int i = 0; i < 3; ++i) {
    out[i] = y[i] + f[i] * dt + G[0][i] * w[0] + G[1][i] * w[1];
  }
  if (scheme == Scheme::Milstein) {
    // Driver 1 acts on (S, I) with coefficients in (S, I); driver 2 acts on x
    // with a coefficient in x. The noise is commutative, so per-driver
    // corrections suffice.
    const auto J = detail::diffusion_jacobian(y, noise);
    for (int k = 0; k < 2; ++k) {
      const double iterated = 0.5 * (w[k] * w[k] - dt);
      for (int i = 0; i < 3; ++i) {
        double lg = 0.0;
        for (int j = 0; j < 3; ++j) lg += G[k][j] * J[k][i][j];
        out[i] += lg * iterated;
      }
    }
  }
  if (!std::isfinite(out[0]) || !std::isfinite(out[1]) || !std::isfinite(out[2])) {
    throw NumericalBlowup(step_index, "non-finite state");
  }
  return out;
}

State project_to_domain(const Vec3& y) {
  State s{y[0], y[1], y[2]};
  s.I = std::clamp(s.I, 0.0, 1.0);
  s.S = std::clamp(s.S, 0.0, 1.0 - s.I);
  s.x = std::clamp(s.x, 0.0, 1.0);
  return s;
}

State step(const State& s, const ModelParams& p, double u, Increment dW,
           const IntegratorConfig& config, std::size_t step_index) {
  return project_to_domain(step_unprojected(s, p, u, dW, config.scheme, config.dt, step_index));
}

namespace {

struct AbsorptionTracker {
  double eps;
  std::optional<XAbsorption> x;
  bool I = false;

  // Pins absorbed coordinates; returns true when a new absorption occurred.
  void apply(State& s, Path& path, double t) {
    if (x) {
      s.x = (*x == XAbsorption::AtZero) ? 0.0 : 1.0;
    } else if (s.x <= eps) {
      x = XAbsorption::AtZero;
      s.x = 0.0;
      path.x_absorption_time = t;
    } else if (s.x >= 1.0 - eps) {
      x = XAbsorption::AtOne;
      s.x = 1.0;
      path.x_absorption_time = t;
    }
    if (I) {
      s.I = 0.0;
    } else if (s.I <= eps) {
      I = true;
      s.I = 0.0;
      path.I_absorption_time = t;
    }
  }
};

template <class IncrementSource>
Path run(const State& initial, const ModelParams& p, const ControlSchedule* control,
         const IntegratorConfig& config, IncrementSource&& next_increment) {
  p.validate();
  config.validate();
  require_in_domain(initial, 1e-12);

  const std::size_t n_steps = config.steps();
  const detail::NoiseScales noise(p);
  const bool milstein = config.scheme == Scheme::Milstein;
  const double dt = config.dt;

  Path path;
  const std::size_t expected = n_steps / config.record_stride + 2;
  path.times.reserve(expected);
  path.states.reserve(expected);
  if (config.record_drivers) {
    path.driver_record.emplace();
    path.driver_record->reserve(n_steps);
  }

  AbsorptionTracker absorb{config.clamp_epsilon, std::nullopt, false};
  State cur = project_to_domain(to_vec(initial));
  absorb.apply(cur, path, 0.0);
  path.times.push_back(0.0);
  path.states.push_back(cur);

  std::size_t n = 0;
  for (; n < n_steps; ++n) {
    const double u = control ? control->at_step(n) : 0.0;
    const Increment inc = next_increment(n);
    if (config.record_drivers) path.driver_record->push_back(inc);

    // Inlined form of step_unprojected.
    const Vec3 y = to_vec(cur);
    const Vec3 f = detail::drift(y, p, u);
    const auto G = detail::diffusion(y, noise);
    Vec3 raw{y[0] + f[0] * dt + G[0][0] * inc.dW1,
             y[1] + f[1] * dt + G[0][1] * inc.dW1,
             y[2] + f[2] * dt + G[1][2] * inc.dW2};
    if (milstein) {
      const auto J = detail::diffusion_jacobian(y, noise);
      const double it1 = 0.5 * (inc.dW1 * inc.dW1 - dt);
      const double it2 = 0.5 * (inc.dW2 * inc.dW2 - dt);
      for (int i = 0; i < 2; ++i) {
        raw[i] += (G[0][0] * J[0][i][0] + G[0][1] * J[0][i][1]) * it1;
      }
      raw[2] += G[1][2] * J[1][2][2] * it2;
    }
    if (!std::isfinite(raw[0]) || !std::isfinite(raw[1]) || !std::isfinite(raw[2])) {
      throw NumericalBlowup(n, "non-finite state");
    }

    const State unprojected = to_state(raw);
    const double overshoot = domain_violation(unprojected);
    if (overshoot > path.max_overshoot) path.max_overshoot = overshoot;

    cur = project_to_domain(raw);
    const double t = static_cast<double>(n + 1) * dt;
    absorb.apply(cur, path, t);

    const bool stop = config.stop_when_x_absorbed && absorb.x.has_value();
    if ((n + 1) % config.record_stride == 0 || n + 1 == n_steps || stop) {
      path.times.push_back(t);
      path.states.push_back(cur);
    }
    if (stop) {
      ++n;
      break;
    }
  }
  path.steps_taken = n;
  path.absorbed_x = absorb.x;
  path.absorbed_I = absorb.I;
  return path;
}

}  // namespace

Path simulate(const State& initial, const ModelParams& p, const ControlSchedule* control,
              const IntegratorConfig& config, const RandomStream& stream) {
  const double sqrt_dt = std::sqrt(config.dt);
  return run(initial, p, control, config, [&](std::size_t n) {
    const auto [z1, z2] = stream.normal_pair(n);
    return Increment{sqrt_dt * z1, sqrt_dt * z2};
  });
}

Path simulate_driven(const State& initial, const ModelParams& p, const ControlSchedule* control,
                     const IntegratorConfig& config, std::span<const Increment> drivers) {
  if (drivers.size() < config.steps()) {
    throw DomainError("driver record has " + std::to_string(drivers.size()) +
                      " increments but the run needs " + std::to_string(config.steps()));
  }
  return run(initial, p, control, config, [&](std::size_t n) { return drivers[n]; });
}

std::vector<Increment> draw_increments(const RandomStream& stream, std::size_t steps, double dt) {
  const double sqrt_dt = std::sqrt(dt);
  std::vector<Increment> out(steps);
  for (std::size_t n = 0; n < steps; ++n) {
    const auto [z1, z2] = stream.normal_pair(n);
    out[n] = {sqrt_dt * z1, sqrt_dt * z2};
  }
  return out;
}

std::vector<Increment> coarsen(std::span<const Increment> fine, std::size_t factor) {
  if (factor == 0) throw DomainError("coarsening factor must be >= 1");
  std::vector<Increment> out(fine.size() / factor);
  for (std::size_t m = 0; m < out.size(); ++m) {
    for (std::size_t k = 0; k < factor; ++k) {
      out[m].dW1 += fine[m * factor + k].dW1;
      out[m].dW2 += fine[m * factor + k].dW2;
    }
  }
  return out;
}

}  // namespace vaxsde
