#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vaxsde/model.hpp"
#include "vaxsde/random.hpp"

namespace vaxsde {

enum class Scheme { EulerMaruyama, Milstein };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct IntegratorConfig {
  Scheme scheme = Scheme::Milstein;
  double dt = 1e-3;
  double t_end = 100.0;
  std::size_t record_stride = 1;
  double clamp_epsilon = 1e-9;
  bool record_drivers = false;
  /// End the run as soon as x reaches an absorbing state. Only sound for
  /// reducers that depend on the x outcome alone.
  bool stop_when_x_absorbed = false;

  void validate() const;
  /// Number of steps; the final time is steps() * dt.
  std::size_t steps() const;

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

/// Brownian increments of both drivers over one step.
struct Increment {
  double dW1 = 0.0;
  double dW2 = 0.0;
};

enum class XAbsorption { AtZero, AtOne };

struct Path {
  std::vector<double> times;
  std::vector<State> states;
  std::optional<XAbsorption> absorbed_x;
  bool absorbed_I = false;
  std::optional<double> x_absorption_time;
  std::optional<double> I_absorption_time;
  /// Per-step increments, present when IntegratorConfig::record_drivers.
  std::optional<std::vector<Increment>> driver_record;
  std::size_t steps_taken = 0;
  /// Largest distance of any unprojected step result from the solution set.
  double max_overshoot = 0.0;

  const State& terminal() const { return states.back(); }
  double end_time() const { return times.back(); }
};

class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(std::size_t step, const std::string& what)
      : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Right-continuous piecewise-constant control on the integration grid:
/// u(t) = values[floor(t / dt)], holding the last value past the end.
class ControlSchedule {
 public:
  ControlSchedule() = default;
  ControlSchedule(double dt, std::vector<double> values);

  static ControlSchedule constant(double dt, std::size_t steps, double value);

  double at_step(std::size_t n) const {
    if (values_.empty()) return 0.0;
    return n < values_.size() ? values_[n] : values_.back();
  }
  double at_time(double t) const;
  double dt() const { return dt_; }
  std::span<const double> values() const { return values_; }
  bool empty() const { return values_.empty(); }

 private:
  double dt_ = 0.0;
  std::vector<double> values_;
};

/// Unprojected one-step update (Euler-Maruyama or Milstein).
Vec3 step_unprojected(const State& s, const ModelParams& p, double u, Increment dW, Scheme scheme,
                      double dt, std::size_t step_index = 0);

/// Project onto the solution set: S, I >= 0, S + I <= 1, 0 <= x <= 1.
State project_to_domain(const Vec3& y);

/// One integration step followed by projection onto the solution set.
/// Throws NumericalBlowup when the update is not finite.
State step(const State& s, const ModelParams& p, double u, Increment dW,
           const IntegratorConfig& config, std::size_t step_index = 0);

/// Simulate with increments drawn from `stream`.
Path simulate(const State& initial, const ModelParams& p, const ControlSchedule* control,
              const IntegratorConfig& config, const RandomStream& stream);

/// Simulate on a supplied driver record (one Increment per step).
Path simulate_driven(const State& initial, const ModelParams& p, const ControlSchedule* control,
                     const IntegratorConfig& config, std::span<const Increment> drivers);

/// Increments generated by `stream` for `steps` steps of size dt.
std::vector<Increment> draw_increments(const RandomStream& stream, std::size_t steps, double dt);

/// Sum consecutive blocks of `factor` increments (shared Brownian path at dt * factor).
std::vector<Increment> coarsen(std::span<const Increment> fine, std::size_t factor);

}  // namespace vaxsde
