#pragma once

// Scenario files: sectioned key = value text.
//
//   # comment
//   [params]
//   beta = 100
//   ...
//
// Sections: params, initial, integrator, run, sweep, control, estimators.
// Unknown sections or keys are rejected. List values are comma separated.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vaxsde/control.hpp"
#include "vaxsde/estimators.hpp"
#include "vaxsde/integrator.hpp"
#include "vaxsde/model.hpp"

namespace vaxsde {

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunBlock {
  std::uint64_t seed = 0;
  std::size_t n_paths = 1;

  friend bool operator==(const RunBlock&, const RunBlock&) = default;
};

struct SweepBlock {
  std::vector<double> sigma2_sq;
  std::vector<double> sigma3_sq;
  std::vector<double> x0;
  std::size_t n_per_cell = 200;
  double terminal_threshold = 0.5;

  friend bool operator==(const SweepBlock&, const SweepBlock&) = default;
};

struct ControlBlock {
  CostWeights weights;
  double u_max = 0.0;
  double t_final = 0.0;
  std::size_t n_noise_paths = 16;
  std::size_t n_eval_paths = 64;
  std::size_t max_iters = 200;
  double relaxation = 0.5;
  double tolerance = 1e-4;
  std::optional<double> dt;  // defaults to the integrator step
  CostateForm costate_form = CostateForm::Displayed;

  friend bool operator==(const ControlBlock&, const ControlBlock&) = default;
};

struct EstimatorBlock {
  double burn_in_fraction = 0.2;
  double flat_tolerance = 1e-3;
  double window_lo = 0.25;
  double window_hi = 0.75;

  friend bool operator==(const EstimatorBlock&, const EstimatorBlock&) = default;
};

struct Scenario {
  ModelParams params;
  State initial;
  IntegratorConfig integrator;
  RunBlock run;
  std::optional<SweepBlock> sweep;
  std::optional<ControlBlock> control;
  EstimatorBlock estimators;

  /// Checks every block; throws ScenarioError naming the offending field.
  void validate() const;

  ControlProblem control_problem() const;
  SweepConfig sweep_config() const;
  SweepSetup sweep_setup() const;
  AbsorptionGrid sweep_grid() const;
  TailOptions tail_options() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

Scenario parse_scenario(std::istream& in);
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& file);

/// Full text with every value written at round-trip precision.
std::string serialize(const Scenario& s);

/// Same content on one line, for CSV comment headers.
std::string one_line(const Scenario& s);

}  // namespace vaxsde
