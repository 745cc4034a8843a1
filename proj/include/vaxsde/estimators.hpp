#pragma once

// Path and ensemble statistics used to check the closed-form results
// empirically: temporal means, growth-rate fits, tail extrema and absorption
// probabilities over parameter grids.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vaxsde/ensemble.hpp"
#include "vaxsde/integrator.hpp"

namespace vaxsde {

enum class Field { S, I, x };

const char* to_string(Field f);
double field_value(const State& s, Field f);

/// Trapezoidal (1/(T - burn_in)) * integral of the field over [burn_in, T];
/// the value at burn_in is linearly interpolated.
double time_average(const Path& path, Field field, double burn_in);

/// Time average of (S - center.S)^2 + (I - center.I)^2 + (x - center.x)^2.
double squared_deviation_average(const Path& path, const State& center, double burn_in);

enum class GrowthTransform { LogOverT, LogitOverT };

struct GrowthRateFit {
  double rate = 0.0;       // least-squares slope
  double r_squared = 0.0;
  std::size_t points = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
  bool truncated = false;  // the field left the transform's domain before the path end
};

/// Least-squares slope of log(Y) or log(Y/(1-Y)) against t over the tail half
/// of the valid (pre-absorption) segment. Throws DomainError when fewer than
/// three valid samples exist.
GrowthRateFit growth_rate(const Path& path, Field field, GrowthTransform transform);

struct TailEstimate {
  double value_inf = 0.0;
  double value_sup = 0.0;
  double window_begin = 0.0;  // stable window in path time
  double window_end = 0.0;
  bool converged = false;
};

struct TailOptions {
  double flat_tolerance = 1e-3;
  /// Reversed-time window over which the cumulative extrema must be flat.
  double window_lo = 0.25;
  double window_hi = 0.75;
};

/// liminf/limsup estimates from the cumulative extrema of the time-reversed
/// samples. A monotone tail reports its terminal value for both.
TailEstimate tail_extrema(const Path& path, Field field, const TailOptions& options = {});

struct AbsorptionGrid {
  std::vector<double> sigma2_sq;
  std::vector<double> sigma3_sq;
  std::vector<double> x0;

  std::size_t cells() const { return sigma2_sq.size() * sigma3_sq.size() * x0.size(); }
};

struct AbsorptionCell {
  double sigma2_sq = 0.0;
  double sigma3_sq = 0.0;
  double x0 = 0.0;
  std::size_t n = 0;
  std::size_t to_zero = 0;
  double p_hat = 0.0;
  double se = 0.0;
  std::uint64_t first_stream = 0;  // streams [first_stream, first_stream + n)
  std::string error;               // non-empty if the cell failed
};

struct AbsorptionTable {
  AbsorptionGrid grid;
  std::uint64_t master_seed = 0;
  std::vector<AbsorptionCell> cells;  // x0 fastest, then sigma3_sq, then sigma2_sq

  const AbsorptionCell& at(std::size_t i2, std::size_t i3, std::size_t ix) const {
    return cells[(i2 * grid.sigma3_sq.size() + i3) * grid.x0.size() + ix];
  }
};

struct SweepSetup {
  ModelParams base;
  double S0 = 0.4;
  double I0 = 0.4;
  IntegratorConfig config;
  std::size_t n_per_cell = 200;
  std::uint64_t master_seed = 0;
  /// Unabsorbed runs with x(T) below this count toward x -> 0.
  double terminal_threshold = 0.5;
};

/// True if the path counts toward lim x = 0.
bool counts_toward_zero(const Path& path, double terminal_threshold = 0.5);

/// Per-cell absorption probability estimates. Cell c uses streams
/// [c * n_per_cell, (c + 1) * n_per_cell). `skip` marks cells to leave empty
/// (used to resume a partially written sweep).
AbsorptionTable absorption_sweep(const SweepSetup& setup, const AbsorptionGrid& grid,
                                 Execution exec = Execution::Parallel,
                                 const std::vector<bool>* skip = nullptr);

}  // namespace vaxsde
