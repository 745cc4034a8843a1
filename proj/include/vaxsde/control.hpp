#pragma once

// Optimal discount u(t) in [0, u_max] on the vaccination cost, maximizing
//   J(u) = -E int_0^Tf (a1 S + a2 I + (a3/2) u^2) dt
// through the stochastic maximum principle. Costates are integrated backward
// along each sampled forward path, reusing its Brownian increments, and the
// control is updated from the ensemble mean of p3 x (1 - x).

#include <cstdint>
#include <string>
#include <vector>

#include "vaxsde/ensemble.hpp"
#include "vaxsde/integrator.hpp"

namespace vaxsde {

struct CostWeights {
  double alpha1 = 0.0;  // susceptible
  double alpha2 = 0.0;  // infected
  double alpha3 = 1.0;  // control effort

  friend bool operator==(const CostWeights&, const CostWeights&) = default;
};

struct ControlProblem {
  ModelParams params;
  CostWeights weights;
  double u_max = 0.8;
  double t_final = 150.0;
  State initial;

  void validate() const;
};

struct Costate {
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
};

/// Volatility loadings of the costates.
struct CostateLoading {
  double q1 = 0.0, q2 = 0.0, q3 = 0.0;
};

double hamiltonian(const State& y, double u, const Costate& p, const CostateLoading& q,
                   const ModelParams& params, const CostWeights& w);

/// dH/du = -a3 u + kappa omega p3 x (1 - x)
double hamiltonian_du(const State& y, double u, const Costate& p, const ModelParams& params,
                      const CostWeights& w);

/// Projection of the stationary point onto [0, u_max].
double optimal_control(double p3_x_mix, const ModelParams& params, const CostWeights& w,
                       double u_max);

/// Drift of the costate equations (dp = drift dt + loading dW).
Costate costate_drift(const State& y, double u, const Costate& p, const ModelParams& params,
                      const CostWeights& w);
CostateLoading costate_loading(const State& y, const Costate& p, const ModelParams& params);

struct CostatePath {
  std::vector<double> times;
  std::vector<Costate> values;  // values.back() is the terminal condition (all zero)
};

/// Backward Euler along a forward path recorded at every step with its
/// driver record. Throws DomainError without a driver record and
/// NumericalBlowup on a non-finite costate.
CostatePath costate_backward(const Path& forward, const ControlSchedule& u,
                             const ModelParams& params, const CostWeights& w, double dt);

/// Pathwise discrete adjoint of the Euler-Maruyama step: the transposed
/// one-step Jacobian (including the noise terms) applied backward along the
/// stored path. Coordinates pinned by absorption carry no sensitivity.
CostatePath costate_backward_adjoint(const Path& forward, const ControlSchedule& u,
                                     const ModelParams& params, const CostWeights& w, double dt);

enum class CostateForm { Displayed, DiscreteAdjoint };
const char* to_string(CostateForm f);
CostateForm costate_form_from_string(const std::string& name);

struct ObjectiveEstimate {
  double value = 0.0;  // Monte Carlo mean of the negated running cost
  double std_error = 0.0;
  std::vector<double> per_path;
};

/// Trapezoid in S and I, exact for the piecewise-constant u^2 term.
double pathwise_cost(const Path& path, const ControlSchedule& u, const CostWeights& w,
                     double t_final);
ObjectiveEstimate objective(const std::vector<Path>& paths, const ControlSchedule& u,
                            const CostWeights& w, double t_final);

struct SweepConfig {
  std::size_t n_noise_paths = 16;
  std::size_t n_eval_paths = 64;
  std::size_t max_iters = 200;
  double relaxation = 0.5;
  double tolerance = 1e-4;
  double dt = 1e-3;
  Scheme scheme = Scheme::Milstein;
  double clamp_epsilon = 1e-9;
  std::uint64_t master_seed = 0;
  /// Held-out evaluation streams start here, disjoint from the sweep streams.
  std::uint64_t eval_stream_offset = 1ull << 40;
  std::vector<double> initial_guess;  // empty: u = 0
  CostateForm costate_form = CostateForm::Displayed;

  void validate() const;
};

struct SweepIteration {
  std::size_t iter = 0;
  double delta_u = 0.0;
  double j_estimate = 0.0;  // on the sweep paths, under the control used in that pass
};

struct ControlSolution {
  ControlSchedule u_star;
  std::vector<double> times;         // grid t_0 .. t_N
  std::vector<State> state_path_mean;  // ensemble mean of the controlled held-out paths
  ObjectiveEstimate objective;         // held-out
  std::vector<SweepIteration> trace;
  std::size_t sweep_iterations = 0;
  bool converged = false;
  /// why the sweep stopped early (a costate blowup); empty otherwise
  std::string stop_reason;
  /// ensemble mean of p3 x (1 - x) at the last sweep pass
  std::vector<double> p3_x_mix;
};

/// One sweep pass at control `u`: mean of p3 x (1 - x) per grid step and the
/// pathwise objective on the sweep paths.
struct SweepPass {
  std::vector<double> p3_x_mix;
  ObjectiveEstimate objective;
};
SweepPass sweep_pass(const ControlProblem& problem, const SweepConfig& config,
                     const ControlSchedule& u, Execution exec = Execution::Parallel);

ControlSolution sweep_solve(const ControlProblem& problem, const SweepConfig& config,
                            Execution exec = Execution::Parallel);

/// Held-out evaluation of an arbitrary control; also returns the per-path
/// objectives so two controls can be compared on common noise.
struct ControlEvaluation {
  ObjectiveEstimate objective;
  std::vector<State> mean_path;
  std::vector<double> times;
  std::vector<double> mean_infected_average;  // per path time average of I
  std::vector<State> terminal_states;
};
ControlEvaluation evaluate_control(const ControlProblem& problem, const SweepConfig& config,
                                   const ControlSchedule& u, Execution exec = Execution::Parallel);

/// Mean and standard error of a[i] - b[i] (common-noise comparison).
MeanEstimate paired_difference(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace vaxsde
