#include "vaxsde/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace vaxsde {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_header(std::ostream& os, const std::string& header) { os << "# " << header << '\n'; }

void write_path_csv(std::ostream& os, const std::string& header, const std::vector<double>& times,
                    const std::vector<State>& states) {
  write_header(os, header);
  os << "t,S,I,x\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    os << format_real(times[k]) << ',' << format_real(states[k].S) << ','
       << format_real(states[k].I) << ',' << format_real(states[k].x) << '\n';
  }
}

void write_path_csv(std::ostream& os, const std::string& header, const Path& path) {
  write_path_csv(os, header, path.times, path.states);
}

void write_drivers_csv(std::ostream& os, const std::string& header,
                       const std::vector<Increment>& drivers) {
  write_header(os, header);
  os << "step,dW1,dW2\n";
  for (std::size_t n = 0; n < drivers.size(); ++n) {
    os << n << ',' << format_real(drivers[n].dW1) << ',' << format_real(drivers[n].dW2) << '\n';
  }
}

void write_absorption_header(std::ostream& os, const std::string& header) {
  write_header(os, header);
  os << "sigma2_sq,sigma3_sq,x0,n,p_hat,se\n";
}

void write_absorption_row(std::ostream& os, const AbsorptionCell& cell) {
  const bool failed = !cell.error.empty() || cell.n == 0;
  os << format_real(cell.sigma2_sq) << ',' << format_real(cell.sigma3_sq) << ','
     << format_real(cell.x0) << ',' << cell.n << ','
     << format_real(failed ? std::nan("") : cell.p_hat) << ','
     << format_real(failed ? std::nan("") : cell.se) << '\n';
}

void write_absorption_csv(std::ostream& os, const std::string& header, const AbsorptionTable& table) {
  write_absorption_header(os, header);
  for (const auto& cell : table.cells) write_absorption_row(os, cell);
}

namespace {

bool parse_field(const std::string& text, double& out) {
  if (text == "nan") {
    out = std::nan("");
    return true;
  }
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

AbsorptionFile read_absorption_csv(std::istream& is) {
  AbsorptionFile file;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) return file;
  file.header = line.substr(2);
  if (!std::getline(is, line) || line != "sigma2_sq,sigma3_sq,x0,n,p_hat,se") return file;
  while (std::getline(is, line)) {
    if (is.eof()) break;  // no trailing newline: the row may be incomplete
    std::stringstream ss(line);
    std::string item;
    std::vector<std::string> f;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 6) break;
    AbsorptionRow row;
    double n = 0.0;
    if (!parse_field(f[0], row.sigma2_sq) || !parse_field(f[1], row.sigma3_sq) ||
        !parse_field(f[2], row.x0) || !parse_field(f[3], n) || !parse_field(f[4], row.p_hat) ||
        !parse_field(f[5], row.se)) {
      break;
    }
    row.n = static_cast<std::size_t>(n);
    file.rows.push_back(row);
  }
  return file;
}

void write_control_csv(std::ostream& os, const std::string& header, const ControlSchedule& u,
                       double t_final) {
  write_header(os, header);
  os << "t,u_star\n";
  const auto values = u.values();
  for (std::size_t n = 0; n < values.size(); ++n) {
    const double t = std::min(static_cast<double>(n) * u.dt(), t_final);
    os << format_real(t) << ',' << format_real(values[n]) << '\n';
  }
}

void write_trace_csv(std::ostream& os, const std::string& header,
                     const std::vector<SweepIteration>& trace) {
  write_header(os, header);
  os << "iter,delta_u,J_estimate\n";
  for (const auto& it : trace) {
    os << it.iter << ',' << format_real(it.delta_u) << ',' << format_real(it.j_estimate) << '\n';
  }
}

}  // namespace vaxsde
