#include "vaxsde/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "vaxsde/control.hpp"
#include "vaxsde/csv.hpp"
#include "vaxsde/equilibria.hpp"
#include "vaxsde/estimators.hpp"
#include "vaxsde/scenario.hpp"

#ifndef VAXSDE_SCENARIO_DIR
#define VAXSDE_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;

namespace vaxsde {

std::string resolve_scenario_path(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  const fs::path bundled = fs::path(VAXSDE_SCENARIO_DIR) / (arg + ".scn");
  if (fs::exists(bundled)) return bundled.string();
  throw ScenarioError("no scenario file or bundled scenario named '" + arg + "'");
}

namespace {

struct Options {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::string out_dir = ".";
  int threads = 0;
  std::optional<double> x_mean;
};

struct Context {
  Scenario scenario;
  std::string name;
  std::string header;
  fs::path out_dir;
};

Context load(const Options& o, const std::string& command) {
  Context c;
  const std::string file = resolve_scenario_path(o.scenario);
  c.scenario = load_scenario(file);
  c.name = fs::path(file).stem().string();
  auto& s = c.scenario;
  if (o.seed) s.run.seed = *o.seed;
  if (o.dt) {
    s.integrator.dt = *o.dt;
    if (s.control) s.control->dt = *o.dt;
  }
  if (o.t_end) {
    s.integrator.t_end = *o.t_end;
    if (s.control) s.control->t_final = *o.t_end;
  }
  s.validate();
  c.header = "vaxsde " + command + " scenario=" + c.name + " seed=" + std::to_string(s.run.seed) +
             " " + one_line(s);
  c.out_dir = o.out_dir;
  fs::create_directories(c.out_dir);
  return c;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  return f;
}

std::string fmt(double v) { return format_real(v); }

std::string fmt(const State& s) { return "(" + fmt(s.S) + ", " + fmt(s.I) + ", " + fmt(s.x) + ")"; }

int cmd_simulate(const Options& o, std::ostream& out, std::ostream&) {
  const Context c = load(o, "simulate");
  const auto& s = c.scenario;
  out << "# " << c.header << "\n";
  out << "dt=" << fmt(s.integrator.dt) << " t_end=" << fmt(s.integrator.t_end)
      << " scheme=" << to_string(s.integrator.scheme) << "\n";
  for (std::size_t k = 0; k < s.run.n_paths; ++k) {
    const Path path = simulate(s.initial, s.params, nullptr, s.integrator, RandomStream(s.run.seed, k));
    const std::string stem = s.run.n_paths == 1 ? c.name : c.name + "_" + std::to_string(k);
    {
      auto f = open_out(c.out_dir / (stem + "_path.csv"));
      write_path_csv(f, c.header + " stream=" + std::to_string(k), path);
    }
    if (path.driver_record) {
      auto f = open_out(c.out_dir / (stem + "_drivers.csv"));
      write_drivers_csv(f, c.header + " stream=" + std::to_string(k), *path.driver_record);
    }
    const std::string p = "path" + std::to_string(k) + ".";
    out << p << "terminal=" << fmt(path.terminal()) << "\n";
    out << p << "I_absorbed=" << (path.absorbed_I ? "true" : "false");
    if (path.I_absorption_time) out << " at t=" << fmt(*path.I_absorption_time);
    out << "\n";
    out << p << "x_absorbed=";
    if (path.absorbed_x) {
      out << (*path.absorbed_x == XAbsorption::AtZero ? "0" : "1") << " at t="
          << fmt(*path.x_absorption_time);
    } else {
      out << "none";
    }
    out << "\n";
    const double burn = s.estimators.burn_in_fraction * path.end_time();
    for (Field f : {Field::S, Field::I, Field::x}) {
      const std::string name = to_string(f);
      out << p << name << "_mean=" << fmt(time_average(path, f, burn));
      try {
        const auto tail = tail_extrema(path, f, s.tail_options());
        out << " " << name << "_inf=" << fmt(tail.value_inf) << " " << name
            << "_sup=" << fmt(tail.value_sup) << " tail_converged=" << (tail.converged ? "true" : "false");
      } catch (const DomainError&) {
        out << " tail=unavailable";
      }
      out << "\n";
    }
    try {
      const auto g = growth_rate(path, Field::I, GrowthTransform::LogOverT);
      out << p << "I_log_slope=" << fmt(g.rate) << " r2=" << fmt(g.r_squared) << "\n";
    } catch (const DomainError&) {
      out << p << "I_log_slope=unavailable\n";
    }
    try {
      const auto g = growth_rate(path, Field::x, GrowthTransform::LogitOverT);
      out << p << "x_logit_slope=" << fmt(g.rate) << " r2=" << fmt(g.r_squared) << "\n";
    } catch (const DomainError&) {
      out << p << "x_logit_slope=unavailable\n";
    }
  }
  return 0;
}

void print_checks(std::ostream& out, const std::vector<Inequality>& checks) {
  for (const auto& q : checks) {
    out << "  check: " << q.text << " : " << fmt(q.lhs) << " " << q.relation << " " << fmt(q.rhs)
        << " -> " << (q.holds ? "holds" : "fails") << "\n";
  }
}

int cmd_report(const Options& o, std::ostream& out, std::ostream&) {
  const Context c = load(o, "report");
  const auto& p = c.scenario.params;
  const double x0 = o.x_mean.value_or(c.scenario.initial.x);
  out << "# " << c.header << "\n";

  const auto th = thresholds(p);
  out << "r0=" << fmt(th.r0) << "\n";
  out << "r0s=" << fmt(th.r0s) << "\n";
  if (th.r0s == th.r0) out << "r0s=r0\n";
  out << "s_d=" << (th.s_d ? fmt(*th.s_d) : "absent") << "\n";
  out << "hit_s=" << (th.hit_s ? fmt(*th.hit_s) : "absent") << "\n";

  const auto eq = equilibrium_report(p);
  out << "E1=" << fmt(eq.e1) << "\n";
  out << "E2=" << fmt(eq.e2) << "\n";
  out << "x3=" << (eq.x3 ? fmt(*eq.x3) : "undefined") << "\n";
  out << "E3=" << (eq.e3 ? fmt(*eq.e3) : "absent (" + eq.e3_reason + ")") << "\n";
  out << "E3.in_R31=" << (eq.in_r31 ? "true" : "false") << " E3.in_R32=" << (eq.in_r32 ? "true" : "false")
      << " corner=(delta " << fmt(eq.r3_corner.delta) << ", omega " << fmt(eq.r3_corner.omega) << ")\n";
  out << "E4=" << (eq.e4 ? fmt(*eq.e4) : "absent (r0 <= 1)") << "\n";
  out << "x5=" << (eq.x5 ? fmt(*eq.x5) : "undefined") << "\n";
  out << "E5=" << (eq.e5 ? fmt(*eq.e5) : "absent (" + eq.e5_reason + ")") << "\n";
  out << "E5.in_R51=" << (eq.in_r51 ? "true" : "false") << " E5.in_R52=" << (eq.in_r52 ? "true" : "false")
      << " corner=(delta " << fmt(eq.r5_corner.delta) << ", omega " << fmt(eq.r5_corner.omega) << ")\n";

  const auto ext = extinction_check(p);
  out << "extinction=" << to_string(ext.condition) << "\n";
  out << "extinction_rate_bound=" << (ext.rate_bound ? fmt(*ext.rate_bound) : "none") << "\n";
  print_checks(out, ext.checks);

  const auto lg = logistic_classifier(p, c.scenario.initial.I);
  out << "logistic.L0=" << fmt(lg.l_at_zero) << " logistic.L1=" << fmt(lg.l_at_one) << "\n";
  out << "logistic=" << to_string(lg.classification) << "\n";

  const auto em = endemic_mean_bounds(p, x0);
  out << "endemic.x_mean=" << fmt(x0) << "\n";
  if (em.applicable) {
    out << "endemic.S_mean in [" << fmt(em.s_mean_lower) << ", " << fmt(em.s_mean_upper) << "]\n";
    out << "endemic.I_mean_lower=" << fmt(em.i_mean_lower) << "\n";
    out << "endemic.I_mean_upper="
        << (em.i_mean_upper ? fmt(*em.i_mean_upper) : "none (" + em.i_mean_upper_reason + ")") << "\n";
    if (em.i_mean_exact) out << "endemic.I_mean_exact=" << fmt(*em.i_mean_exact) << "\n";
  } else {
    out << "endemic=not applicable (" << em.reason << ")\n";
  }

  const auto pw = pathwise_bounds(p, x0, x0);
  if (pw.applicable) {
    out << "pathwise.S_sup_upper=" << fmt(pw.s_sup_upper) << "\n";
    out << "pathwise.I_inf_upper=" << fmt(pw.i_inf_upper) << "\n";
    out << "pathwise.I_sup in [" << fmt(pw.i_sup_lower) << ", " << fmt(pw.i_sup_upper) << "]\n";
  } else {
    out << "pathwise=not applicable (" << pw.reason << ")\n";
  }

  if (eq.e5) {
    try {
      const auto d = deviation_bound(p, *eq.e5);
      out << "deviation.m=" << fmt(d.m) << " deviation.bound=" << fmt(d.bound) << "\n";
    } catch (const RegimeError& e) {
      out << "deviation=not applicable (" << e.what() << ")\n";
    }
  } else {
    out << "deviation=not applicable (E5 absent)\n";
  }
  return 0;
}

bool row_matches(const AbsorptionRow& r, const AbsorptionCell& c, std::size_t n) {
  return r.sigma2_sq == c.sigma2_sq && r.sigma3_sq == c.sigma3_sq && r.x0 == c.x0 && r.n == n;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const Context c = load(o, "sweep");
  if (!c.scenario.sweep) throw ScenarioError("scenario has no [sweep] section");
  const auto setup = c.scenario.sweep_setup();
  const auto grid = c.scenario.sweep_grid();
  const fs::path file = c.out_dir / (c.name + "_absorption.csv");

  // cell coordinates in output order
  const std::vector<bool> skip_all(grid.cells(), true);
  AbsorptionTable layout = absorption_sweep(setup, grid, Execution::Serial, &skip_all);

  std::size_t done = 0;
  if (fs::exists(file)) {
    std::ifstream in(file);
    const auto prev = read_absorption_csv(in);
    if (prev.header == c.header) {
      while (done < prev.rows.size() && done < layout.cells.size() &&
             row_matches(prev.rows[done], layout.cells[done], setup.n_per_cell)) {
        layout.cells[done].n = prev.rows[done].n;
        layout.cells[done].p_hat = prev.rows[done].p_hat;
        layout.cells[done].se = prev.rows[done].se;
        ++done;
      }
    }
  }
  {
    auto f = open_out(file);
    write_absorption_header(f, c.header);
    for (std::size_t i = 0; i < done; ++i) write_absorption_row(f, layout.cells[i]);
  }
  if (done > 0) err << "resuming after " << done << " completed cells\n";

  bool failures = false;
  std::ofstream f(file, std::ios::app);
  std::vector<bool> skip(grid.cells(), true);
  for (std::size_t i = done; i < grid.cells(); ++i) {
    skip.assign(grid.cells(), true);
    skip[i] = false;
    const auto part = absorption_sweep(setup, grid, Execution::Parallel, &skip);
    const auto& cell = part.cells[i];
    write_absorption_row(f, cell);
    f.flush();
    if (!cell.error.empty()) {
      failures = true;
      err << "cell " << i << " failed: " << cell.error << "\n";
    }
    err << "cell " << (i + 1) << "/" << grid.cells() << " sigma2_sq=" << fmt(cell.sigma2_sq)
        << " sigma3_sq=" << fmt(cell.sigma3_sq) << " x0=" << fmt(cell.x0) << " p_hat=" << fmt(cell.p_hat)
        << "\n";
  }
  out << "# " << c.header << "\n";
  out << "cells=" << grid.cells() << " n_per_cell=" << setup.n_per_cell << " resumed=" << done << "\n";
  out << "wrote " << file.string() << "\n";
  return failures ? 1 : 0;
}

int cmd_control(const Options& o, std::ostream& out, std::ostream& err) {
  const Context c = load(o, "control");
  if (!c.scenario.control) throw ScenarioError("scenario has no [control] section");
  const auto problem = c.scenario.control_problem();
  const auto config = c.scenario.sweep_config();

  const auto sol = sweep_solve(problem, config);
  const std::size_t N = sol.u_star.values().size();
  const auto zero = ControlSchedule::constant(config.dt, N, 0.0);
  const auto full = ControlSchedule::constant(config.dt, N, problem.u_max);
  const auto base = evaluate_control(problem, config, zero);
  const auto capped = evaluate_control(problem, config, full);

  {
    auto f = open_out(c.out_dir / (c.name + "_u_star.csv"));
    write_control_csv(f, c.header, sol.u_star, problem.t_final);
  }
  {
    auto f = open_out(c.out_dir / (c.name + "_controlled_path.csv"));
    write_path_csv(f, c.header + " control=u_star", sol.times, sol.state_path_mean);
  }
  {
    auto f = open_out(c.out_dir / (c.name + "_uncontrolled_path.csv"));
    write_path_csv(f, c.header + " control=zero", base.times, base.mean_path);
  }
  {
    auto f = open_out(c.out_dir / (c.name + "_trace.csv"));
    write_trace_csv(f, c.header, sol.trace);
  }

  const auto d0 = paired_difference(sol.objective.per_path, base.objective.per_path);
  const auto dmax = paired_difference(sol.objective.per_path, capped.objective.per_path);
  out << "# " << c.header << "\n";
  out << "converged=" << (sol.converged ? "true" : "false") << " iterations=" << sol.sweep_iterations << "\n";
  if (!sol.stop_reason.empty()) out << "stopped=" << sol.stop_reason << "\n";
  out << "J(u_star)=" << fmt(sol.objective.value) << " se=" << fmt(sol.objective.std_error) << "\n";
  out << "J(0)=" << fmt(base.objective.value) << " se=" << fmt(base.objective.std_error) << "\n";
  out << "J(u_max)=" << fmt(capped.objective.value) << " se=" << fmt(capped.objective.std_error) << "\n";
  out << "J(u_star)-J(0)=" << fmt(d0.mean) << " se=" << fmt(d0.std_error) << "\n";
  out << "J(u_star)-J(u_max)=" << fmt(dmax.mean) << " se=" << fmt(dmax.std_error) << "\n";
  out << "improves_on_zero=" << (d0.mean - 1.96 * d0.std_error > 0.0 ? "true" : "false") << "\n";
  out << "controlled_terminal_mean=" << fmt(sol.state_path_mean.back()) << "\n";
  out << "uncontrolled_terminal_mean=" << fmt(base.mean_path.back()) << "\n";
  if (!sol.converged) {
    err << "control sweep did not converge after " << sol.sweep_iterations << " iterations";
    if (!sol.stop_reason.empty()) err << " (" << sol.stop_reason << ")";
    err << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic vaccination-behaviour epidemic model toolkit", "vaxsde"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "scenario file or bundled scenario name")->required();
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--dt", o.dt, "time step");
    sub->add_option("--t-end", o.t_end, "end time (control horizon for `control`)");
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--threads", o.threads, "worker thread cap")->check(CLI::NonNegativeNumber);
  };
  auto* sim = app.add_subcommand("simulate", "simulate paths and report estimators");
  auto* rep = app.add_subcommand("report", "thresholds, equilibria and condition checks");
  auto* swp = app.add_subcommand("sweep", "absorption probability grid");
  auto* ctl = app.add_subcommand("control", "optimal vaccination-cost discount");
  for (auto* sub : {sim, rep, swp, ctl}) add_common(sub);
  rep->add_option("--x-mean", o.x_mean, "limiting mean of x used by the bound checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    set_worker_count(o.threads);
    if (*sim) return cmd_simulate(o, out, err);
    if (*rep) return cmd_report(o, out, err);
    if (*swp) return cmd_sweep(o, out, err);
    return cmd_control(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace vaxsde
