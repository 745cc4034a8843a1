#include <benchmark/benchmark.h>

#include "vaxsde/control.hpp"
#include "vaxsde/ensemble.hpp"
#include "vaxsde/estimators.hpp"

using namespace vaxsde;

namespace {

ModelParams bistable() {
  ModelParams p;
  p.omega = 0.1;
  p.delta = 0.5;
  p.sigma1_sq = 0.16;
  p.sigma2_sq = 0.15;
  p.sigma3_sq = 0.2;
  return p;
}

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_Ensemble(benchmark::State& state) {
  const auto p = bistable();
  IntegratorConfig config;
  config.dt = 1e-3;
  config.t_end = 10.0;
  config.record_stride = config.steps();
  for (auto _ : state) {
    const auto x = ensemble_map({0.4, 0.4, 0.8}, p, config, 64, 7,
                                [](const Path& path, std::uint64_t) { return path.terminal().x; },
                                mode(state));
    benchmark::DoNotOptimize(x.data());
  }
  state.SetLabel(mode(state) == Execution::Serial ? "serial" : "openmp");
}
BENCHMARK(BM_Ensemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AbsorptionSweep(benchmark::State& state) {
  SweepSetup setup;
  setup.base = bistable();
  setup.config.dt = 1e-3;
  setup.config.t_end = 10.0;
  setup.n_per_cell = 16;
  const AbsorptionGrid grid{{0.1, 0.5}, {0.2, 1.0}, {0.2, 0.8}};
  for (auto _ : state) {
    const auto table = absorption_sweep(setup, grid, mode(state));
    benchmark::DoNotOptimize(table.cells.data());
  }
  state.SetLabel(mode(state) == Execution::Serial ? "serial" : "openmp");
}
BENCHMARK(BM_AbsorptionSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ControlPass(benchmark::State& state) {
  ControlProblem problem;
  problem.params = bistable();
  problem.params.omega = 2.0;
  problem.weights = {0.0, 1000.0, 100.0};
  problem.u_max = 0.8;
  problem.t_final = 10.0;
  problem.initial = {0.9, 0.1, 0.1};
  SweepConfig config;
  config.dt = 1e-3;
  config.n_noise_paths = 16;
  const auto u = ControlSchedule::constant(config.dt, 10000, 0.4);
  for (auto _ : state) {
    const auto pass = sweep_pass(problem, config, u, mode(state));
    benchmark::DoNotOptimize(pass.p3_x_mix.data());
  }
  state.SetLabel(mode(state) == Execution::Serial ? "serial" : "openmp");
}
BENCHMARK(BM_ControlPass)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
