#include "vaxsde/control.hpp"

#include <algorithm>
#include <cmath>

namespace vaxsde {

void ControlProblem::validate() const {
  params.validate();
  if (!(weights.alpha1 >= 0.0) || !(weights.alpha2 >= 0.0) || !std::isfinite(weights.alpha1) ||
      !std::isfinite(weights.alpha2)) {
    throw DomainError("cost weights alpha1, alpha2 must be finite and >= 0");
  }
  if (!(weights.alpha3 > 0.0) || !std::isfinite(weights.alpha3)) {
    throw DomainError("alpha3 must be finite and > 0");
  }
  if (!(u_max >= 0.0 && u_max < 1.0)) throw DomainError("u_max must lie in [0, 1)");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw DomainError("t_final must be > 0");
  require_in_domain(initial);
}

void SweepConfig::validate() const {
  if (n_noise_paths < 1) throw DomainError("n_noise_paths must be >= 1");
  if (n_eval_paths < 2) throw DomainError("n_eval_paths must be >= 2");
  if (max_iters < 1) throw DomainError("max_iters must be >= 1");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) throw DomainError("relaxation must lie in (0, 1]");
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be > 0");
  if (eval_stream_offset < n_noise_paths) {
    throw DomainError("evaluation streams overlap the sweep streams");
  }
}

namespace {

double mix(double x) { return x * (1.0 - x); }

IntegratorConfig forward_config(const ControlProblem& problem, const SweepConfig& config,
                                bool drivers) {
  IntegratorConfig ic;
  ic.scheme = config.scheme;
  ic.dt = config.dt;
  ic.t_end = problem.t_final;
  ic.record_stride = 1;
  ic.clamp_epsilon = config.clamp_epsilon;
  ic.record_drivers = drivers;
  ic.validate();
  return ic;
}

}  // namespace

double hamiltonian(const State& y, double u, const Costate& p, const CostateLoading& q,
                   const ModelParams& params, const CostWeights& w) {
  const auto f = detail::drift(to_vec(y), params, u);
  const auto g = detail::diffusion(to_vec(y), detail::NoiseScales(params));
  const double running = w.alpha1 * y.S + w.alpha2 * y.I + 0.5 * w.alpha3 * u * u;
  return -running + p.p1 * f[0] + p.p2 * f[1] + p.p3 * f[2] + q.q1 * g[0][0] + q.q2 * g[0][1] +
         q.q3 * g[1][2];
}

double hamiltonian_du(const State& y, double u, const Costate& p, const ModelParams& params,
                      const CostWeights& w) {
  return -w.alpha3 * u + params.kappa * params.omega * p.p3 * mix(y.x);
}

double optimal_control(double p3_x_mix, const ModelParams& params, const CostWeights& w,
                       double u_max) {
  const double stationary = params.kappa * params.omega / w.alpha3 * p3_x_mix;
  return std::max(0.0, std::min(stationary, u_max));
}

Costate costate_drift(const State& y, double u, const Costate& p, const ModelParams& params,
                      const CostWeights& w) {
  const double S = y.S, I = y.I, x = y.x;
  const double b = params.beta, mu = params.mu, g = params.gamma, k = params.kappa;
  const double s1 = params.sigma1_sq, s2 = params.sigma_sq();
  const double m = mix(x);
  const double bracket = -params.omega * (1.0 - u) + I + params.delta * (2.0 * x - 1.0) +
                         k * (params.sigma3_sq - s2 * x);
  Costate d;
  d.p1 = w.alpha1 + p.p1 * (b * I + mu - 2.0 * s1 * S * I * I) - p.p2 * (b * I + 2.0 * s1 * S * I * I);
  d.p2 = w.alpha2 + p.p1 * (b * S - 2.0 * s1 * S * S * I) -
         p.p2 * (b * S - (mu + g) + 2.0 * s1 * S * S * I) - k * p.p3 * m;
  d.p3 = mu * p.p1 - k * p.p3 *
                         ((1.0 - 2.0 * x) * bracket + (2.0 * params.delta - k * s2) * m +
                          2.0 * k * s2 * m * (1.0 - 2.0 * x));
  return d;
}

CostateLoading costate_loading(const State& y, const Costate& p, const ModelParams& params) {
  const double s1 = std::sqrt(params.sigma1_sq);
  return {-s1 * p.p1 * y.S * y.I, s1 * p.p2 * y.S * y.I,
          params.kappa * std::sqrt(params.sigma_sq()) * p.p3 * mix(y.x)};
}

CostatePath costate_backward(const Path& forward, const ControlSchedule& u,
                             const ModelParams& params, const CostWeights& w, double dt) {
  if (!forward.driver_record) throw DomainError("costate integration needs the driver record");
  const auto& dW = *forward.driver_record;
  const std::size_t N = dW.size();
  if (forward.states.size() != N + 1 || forward.times.size() != N + 1) {
    throw DomainError("forward path must be recorded at every step");
  }
  CostatePath out;
  out.times = forward.times;
  out.values.assign(N + 1, Costate{});
  for (std::size_t n = N; n-- > 0;) {
    const State& y = forward.states[n];
    const Costate& next = out.values[n + 1];
    const Costate f = costate_drift(y, u.at_step(n), next, params, w);
    const CostateLoading q = costate_loading(y, next, params);
    Costate& cur = out.values[n];
    cur.p1 = next.p1 - f.p1 * dt - q.q1 * dW[n].dW1;
    cur.p2 = next.p2 - f.p2 * dt - q.q2 * dW[n].dW1;
    cur.p3 = next.p3 - f.p3 * dt - q.q3 * dW[n].dW2;
    if (!std::isfinite(cur.p1) || !std::isfinite(cur.p2) || !std::isfinite(cur.p3)) {
      throw NumericalBlowup(n, "non-finite costate");
    }
  }
  return out;
}

CostatePath costate_backward_adjoint(const Path& forward, const ControlSchedule& u,
                                     const ModelParams& params, const CostWeights& w, double dt) {
  if (!forward.driver_record) throw DomainError("costate integration needs the driver record");
  const auto& dW = *forward.driver_record;
  const std::size_t N = dW.size();
  if (forward.states.size() != N + 1 || forward.times.size() != N + 1) {
    throw DomainError("forward path must be recorded at every step");
  }
  const double b = params.beta, mu = params.mu, g = params.gamma, k = params.kappa;
  const double s1 = std::sqrt(params.sigma1_sq);
  const double c = k * std::sqrt(params.sigma_sq());
  const double s2 = params.sigma_sq();

  CostatePath out;
  out.times = forward.times;
  out.values.assign(N + 1, Costate{});
  for (std::size_t n = N; n-- > 0;) {
    const State& y = forward.states[n];
    const double S = y.S, I = y.I, x = y.x;
    Costate next = out.values[n + 1];
    const double t_next = forward.times[n + 1];
    if (forward.I_absorption_time && t_next >= *forward.I_absorption_time) next.p2 = 0.0;
    if (forward.x_absorption_time && t_next >= *forward.x_absorption_time) next.p3 = 0.0;

    const double bracket = detail::replicator_bracket(I, x, params, u.at_step(n));
    const double m = mix(x);
    // rows: d(step_i)/d(S, I, x)
    const double a11 = -b * I - mu, a12 = -b * S, a13 = -mu;
    const double a21 = b * I, a22 = b * S - (mu + g);
    const double a32 = k * m, a33 = k * ((1.0 - 2.0 * x) * bracket + m * (2.0 * params.delta - k * s2));
    const double w1 = dW[n].dW1, w2 = dW[n].dW2;
    const double d = next.p2 - next.p1;  // noise column 1 is sigma1 S I (-1, 1, 0)

    Costate& cur = out.values[n];
    cur.p1 = next.p1 + (a11 * next.p1 + a21 * next.p2 - w.alpha1) * dt + s1 * I * d * w1;
    cur.p2 = next.p2 + (a12 * next.p1 + a22 * next.p2 + a32 * next.p3 - w.alpha2) * dt + s1 * S * d * w1;
    cur.p3 = next.p3 + (a13 * next.p1 + a33 * next.p3) * dt + c * (1.0 - 2.0 * x) * next.p3 * w2;
    if (!std::isfinite(cur.p1) || !std::isfinite(cur.p2) || !std::isfinite(cur.p3)) {
      throw NumericalBlowup(n, "non-finite costate");
    }
  }
  return out;
}

const char* to_string(CostateForm f) {
  return f == CostateForm::Displayed ? "displayed" : "discrete_adjoint";
}

CostateForm costate_form_from_string(const std::string& name) {
  if (name == "displayed") return CostateForm::Displayed;
  if (name == "discrete_adjoint") return CostateForm::DiscreteAdjoint;
  throw DomainError("unknown costate form '" + name + "'");
}

double pathwise_cost(const Path& path, const ControlSchedule& u, const CostWeights& w,
                     double t_final) {
  double cost = 0.0;
  for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
    const auto& a = path.states[k];
    const auto& b = path.states[k + 1];
    const double la = w.alpha1 * a.S + w.alpha2 * a.I;
    const double lb = w.alpha1 * b.S + w.alpha2 * b.I;
    cost += 0.5 * (la + lb) * (path.times[k + 1] - path.times[k]);
  }
  if (w.alpha3 != 0.0) {
    const double dt = u.empty() ? t_final : u.dt();
    double effort = 0.0;
    for (std::size_t n = 0; static_cast<double>(n) * dt < t_final; ++n) {
      const double lo = static_cast<double>(n) * dt;
      const double width = std::min(lo + dt, t_final) - lo;
      const double un = u.at_step(n);
      effort += un * un * width;
    }
    cost += 0.5 * w.alpha3 * effort;
  }
  return cost;
}

ObjectiveEstimate objective(const std::vector<Path>& paths, const ControlSchedule& u,
                            const CostWeights& w, double t_final) {
  ObjectiveEstimate out;
  out.per_path.reserve(paths.size());
  for (const auto& path : paths) out.per_path.push_back(-pathwise_cost(path, u, w, t_final));
  const auto est = mean_estimate(out.per_path);
  out.value = est.mean;
  out.std_error = est.std_error;
  return out;
}

SweepPass sweep_pass(const ControlProblem& problem, const SweepConfig& config,
                     const ControlSchedule& u, Execution exec) {
  const IntegratorConfig ic = forward_config(problem, config, true);
  const std::size_t N = ic.steps();

  struct Contribution {
    std::vector<double> p3_mix;
    double j = 0.0;
  };
  const auto parts = indexed_map(config.n_noise_paths, exec, [&](std::size_t k) {
    const Path path = simulate(problem.initial, problem.params, &u, ic,
                               RandomStream(config.master_seed, static_cast<std::uint64_t>(k)));
    const CostatePath cp =
        config.costate_form == CostateForm::Displayed
            ? costate_backward(path, u, problem.params, problem.weights, ic.dt)
            : costate_backward_adjoint(path, u, problem.params, problem.weights, ic.dt);
    Contribution c;
    c.p3_mix.resize(N);
    for (std::size_t n = 0; n < N; ++n) c.p3_mix[n] = cp.values[n].p3 * mix(path.states[n].x);
    c.j = -pathwise_cost(path, u, problem.weights, problem.t_final);
    return c;
  });

  // reduction in stream order, independent of the worker count
  SweepPass pass;
  pass.p3_x_mix.assign(N, 0.0);
  pass.objective.per_path.reserve(parts.size());
  for (const auto& c : parts) {
    for (std::size_t n = 0; n < N; ++n) pass.p3_x_mix[n] += c.p3_mix[n];
    pass.objective.per_path.push_back(c.j);
  }
  const double inv = 1.0 / static_cast<double>(parts.size());
  for (auto& v : pass.p3_x_mix) v *= inv;
  const auto est = mean_estimate(pass.objective.per_path);
  pass.objective.value = est.mean;
  pass.objective.std_error = est.std_error;
  return pass;
}

ControlEvaluation evaluate_control(const ControlProblem& problem, const SweepConfig& config,
                                   const ControlSchedule& u, Execution exec) {
  problem.validate();
  config.validate();
  const IntegratorConfig ic = forward_config(problem, config, false);
  const std::size_t N = ic.steps();
  const std::size_t stride = std::max<std::size_t>(1, N / 1500);

  struct Reduced {
    double j = 0.0;
    double i_average = 0.0;
    State terminal;
    std::vector<State> samples;
    std::vector<double> times;
  };
  const auto parts = indexed_map(config.n_eval_paths, exec, [&](std::size_t k) {
    const auto id = config.eval_stream_offset + static_cast<std::uint64_t>(k);
    const Path path = simulate(problem.initial, problem.params, &u, ic,
                               RandomStream(config.master_seed, id));
    Reduced r;
    r.j = -pathwise_cost(path, u, problem.weights, problem.t_final);
    double integral = 0.0;
    for (std::size_t n = 0; n + 1 < path.times.size(); ++n) {
      integral += 0.5 * (path.states[n].I + path.states[n + 1].I) * (path.times[n + 1] - path.times[n]);
    }
    r.i_average = integral / path.end_time();
    r.terminal = path.terminal();
    for (std::size_t n = 0; n < path.states.size(); n += stride) {
      r.samples.push_back(path.states[n]);
      r.times.push_back(path.times[n]);
    }
    if ((path.states.size() - 1) % stride != 0) {
      r.samples.push_back(path.terminal());
      r.times.push_back(path.end_time());
    }
    return r;
  });

  ControlEvaluation ev;
  ev.times = parts.front().times;
  ev.mean_path.assign(ev.times.size(), State{0.0, 0.0, 0.0});
  for (const auto& r : parts) {
    ev.objective.per_path.push_back(r.j);
    ev.mean_infected_average.push_back(r.i_average);
    ev.terminal_states.push_back(r.terminal);
    for (std::size_t n = 0; n < ev.mean_path.size(); ++n) {
      ev.mean_path[n].S += r.samples[n].S;
      ev.mean_path[n].I += r.samples[n].I;
      ev.mean_path[n].x += r.samples[n].x;
    }
  }
  const double inv = 1.0 / static_cast<double>(parts.size());
  for (auto& s : ev.mean_path) {
    s.S *= inv;
    s.I *= inv;
    s.x *= inv;
  }
  const auto est = mean_estimate(ev.objective.per_path);
  ev.objective.value = est.mean;
  ev.objective.std_error = est.std_error;
  return ev;
}

MeanEstimate paired_difference(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DomainError("paired comparison needs equal sample counts");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return mean_estimate(d);
}

ControlSolution sweep_solve(const ControlProblem& problem, const SweepConfig& config,
                            Execution exec) {
  problem.validate();
  config.validate();
  const IntegratorConfig ic = forward_config(problem, config, true);
  const std::size_t N = ic.steps();

  std::vector<double> u(N, 0.0);
  if (!config.initial_guess.empty()) {
    if (config.initial_guess.size() != N) throw DomainError("initial guess must have one value per step");
    for (std::size_t n = 0; n < N; ++n) {
      u[n] = std::clamp(config.initial_guess[n], 0.0, problem.u_max);
    }
  }

  ControlSolution sol;
  const double theta = config.relaxation;
  for (std::size_t iter = 1; iter <= config.max_iters; ++iter) {
    const ControlSchedule current(ic.dt, u);
    SweepPass pass;
    try {
      pass = sweep_pass(problem, config, current, exec);
    } catch (const PathError& e) {
      sol.stop_reason = e.what();
      break;
    }
    double delta = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      const double candidate =
          optimal_control(pass.p3_x_mix[n], problem.params, problem.weights, problem.u_max);
      // the convex combination stays in [0, u_max]; clamp guards rounding
      const double next = std::clamp((1.0 - theta) * u[n] + theta * candidate, 0.0, problem.u_max);
      delta = std::max(delta, std::abs(next - u[n]));
      u[n] = next;
    }
    sol.trace.push_back({iter, delta, pass.objective.value});
    sol.sweep_iterations = iter;
    sol.p3_x_mix = std::move(pass.p3_x_mix);
    if (delta < config.tolerance) {
      sol.converged = true;
      break;
    }
  }

  sol.u_star = ControlSchedule(ic.dt, u);
  const ControlEvaluation ev = evaluate_control(problem, config, sol.u_star, exec);
  sol.times = ev.times;
  sol.state_path_mean = ev.mean_path;
  sol.objective = ev.objective;
  return sol;
}

}  // namespace vaxsde
