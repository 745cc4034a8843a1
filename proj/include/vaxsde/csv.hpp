#pragma once

// CSV artifacts. Every file starts with one "# ..." comment line carrying the
// resolved scenario and seed.

#include <iosfwd>
#include <string>
#include <vector>

#include "vaxsde/control.hpp"
#include "vaxsde/estimators.hpp"
#include "vaxsde/integrator.hpp"

namespace vaxsde {

/// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

void write_header(std::ostream& os, const std::string& header);

void write_path_csv(std::ostream& os, const std::string& header, const std::vector<double>& times,
                    const std::vector<State>& states);
void write_path_csv(std::ostream& os, const std::string& header, const Path& path);

/// step,dW1,dW2
void write_drivers_csv(std::ostream& os, const std::string& header,
                       const std::vector<Increment>& drivers);

void write_absorption_header(std::ostream& os, const std::string& header);
void write_absorption_row(std::ostream& os, const AbsorptionCell& cell);
void write_absorption_csv(std::ostream& os, const std::string& header, const AbsorptionTable& table);

struct AbsorptionRow {
  double sigma2_sq = 0.0, sigma3_sq = 0.0, x0 = 0.0;
  std::size_t n = 0;
  double p_hat = 0.0, se = 0.0;
};

struct AbsorptionFile {
  std::string header;  // comment line without the leading "# "
  std::vector<AbsorptionRow> rows;
};

/// Reads a file written by write_absorption_csv; a truncated final line is dropped.
AbsorptionFile read_absorption_csv(std::istream& is);

/// t,u_star on the control grid
void write_control_csv(std::ostream& os, const std::string& header, const ControlSchedule& u,
                       double t_final);

/// iter,delta_u,J_estimate
void write_trace_csv(std::ostream& os, const std::string& header,
                     const std::vector<SweepIteration>& trace);

}  // namespace vaxsde
