#include "vaxsde/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace vaxsde {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ScenarioError(where + ": not a number: '" + text + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& text, const std::string& where) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ScenarioError(where + ": not a non-negative integer: '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& text, const std::string& where) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ScenarioError(where + ": expected true or false: '" + text + "'");
}

std::vector<double> parse_list(const std::string& text, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(trim(item), where));
  if (out.empty()) throw ScenarioError(where + ": empty list");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }

std::string fmt(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out;
}

struct Key {
  std::string section;
  std::string name;
  bool required;
  std::function<void(Scenario&, const std::string&, const std::string&)> set;
  std::function<std::optional<std::string>(const Scenario&)> get;
};

#define REAL(sec, name, req, expr)                                                          \
  Key {                                                                                     \
    sec, name, req,                                                                         \
        [](Scenario& s, const std::string& v, const std::string& w) { expr = parse_real(v, w); }, \
        [](const Scenario& s) -> std::optional<std::string> { return fmt(expr); }            \
  }
#define UINT(sec, name, req, expr)                                                                \
  Key {                                                                                           \
    sec, name, req,                                                                               \
        [](Scenario& s, const std::string& v, const std::string& w) { expr = parse_uint(v, w); }, \
        [](const Scenario& s) -> std::optional<std::string> {                                     \
          return fmt(static_cast<std::uint64_t>(expr));                                           \
        }                                                                                         \
  }
#define LIST(sec, name, req, expr)                                                                \
  Key {                                                                                           \
    sec, name, req,                                                                               \
        [](Scenario& s, const std::string& v, const std::string& w) { expr = parse_list(v, w); }, \
        [](const Scenario& s) -> std::optional<std::string> { return fmt(expr); }                  \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      REAL("params", "mu", true, s.params.mu),
      REAL("params", "beta", true, s.params.beta),
      REAL("params", "gamma", true, s.params.gamma),
      REAL("params", "kappa", true, s.params.kappa),
      REAL("params", "omega", true, s.params.omega),
      REAL("params", "delta", true, s.params.delta),
      REAL("params", "sigma1_sq", true, s.params.sigma1_sq),
      REAL("params", "sigma2_sq", true, s.params.sigma2_sq),
      REAL("params", "sigma3_sq", true, s.params.sigma3_sq),

      REAL("initial", "S", true, s.initial.S),
      REAL("initial", "I", true, s.initial.I),
      REAL("initial", "x", true, s.initial.x),

      Key{"integrator", "scheme", false,
          [](Scenario& s, const std::string& v, const std::string& w) {
            try {
              s.integrator.scheme = scheme_from_string(v);
            } catch (const std::exception&) {
              throw ScenarioError(w + ": unknown scheme '" + v + "'");
            }
          },
          [](const Scenario& s) -> std::optional<std::string> { return to_string(s.integrator.scheme); }},
      REAL("integrator", "dt", false, s.integrator.dt),
      REAL("integrator", "t_end", false, s.integrator.t_end),
      UINT("integrator", "record_stride", false, s.integrator.record_stride),
      REAL("integrator", "clamp_epsilon", false, s.integrator.clamp_epsilon),
      Key{"integrator", "record_drivers", false,
          [](Scenario& s, const std::string& v, const std::string& w) {
            s.integrator.record_drivers = parse_bool(v, w);
          },
          [](const Scenario& s) -> std::optional<std::string> {
            return s.integrator.record_drivers ? "true" : "false";
          }},

      UINT("run", "seed", false, s.run.seed),
      UINT("run", "n_paths", false, s.run.n_paths),

      LIST("sweep", "sigma2_sq", true, s.sweep->sigma2_sq),
      LIST("sweep", "sigma3_sq", true, s.sweep->sigma3_sq),
      LIST("sweep", "x0", true, s.sweep->x0),
      UINT("sweep", "n_per_cell", false, s.sweep->n_per_cell),
      REAL("sweep", "terminal_threshold", false, s.sweep->terminal_threshold),

      REAL("control", "alpha1", true, s.control->weights.alpha1),
      REAL("control", "alpha2", true, s.control->weights.alpha2),
      REAL("control", "alpha3", true, s.control->weights.alpha3),
      REAL("control", "u_max", true, s.control->u_max),
      REAL("control", "t_final", true, s.control->t_final),
      UINT("control", "n_noise_paths", false, s.control->n_noise_paths),
      UINT("control", "n_eval_paths", false, s.control->n_eval_paths),
      UINT("control", "max_iters", false, s.control->max_iters),
      REAL("control", "relaxation", false, s.control->relaxation),
      REAL("control", "tolerance", false, s.control->tolerance),
      Key{"control", "dt", false,
          [](Scenario& s, const std::string& v, const std::string& w) { s.control->dt = parse_real(v, w); },
          [](const Scenario& s) -> std::optional<std::string> {
            if (!s.control->dt) return std::nullopt;
            return fmt(*s.control->dt);
          }},
      Key{"control", "costate", false,
          [](Scenario& s, const std::string& v, const std::string& w) {
            try {
              s.control->costate_form = costate_form_from_string(v);
            } catch (const std::exception&) {
              throw ScenarioError(w + ": unknown costate form '" + v + "'");
            }
          },
          [](const Scenario& s) -> std::optional<std::string> {
            return to_string(s.control->costate_form);
          }},

      REAL("estimators", "burn_in_fraction", false, s.estimators.burn_in_fraction),
      REAL("estimators", "flat_tolerance", false, s.estimators.flat_tolerance),
      REAL("estimators", "window_lo", false, s.estimators.window_lo),
      REAL("estimators", "window_hi", false, s.estimators.window_hi),
  };
  return table;
}

#undef REAL
#undef UINT
#undef LIST

const std::vector<std::string> kSections = {"params", "initial", "integrator", "run",
                                            "sweep",  "control", "estimators"};

bool section_present(const Scenario& s, const std::string& sec) {
  if (sec == "sweep") return s.sweep.has_value();
  if (sec == "control") return s.control.has_value();
  return true;
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
  Scenario s;
  std::string section;
  std::set<std::string> seen_sections;
  std::set<std::pair<std::string, std::string>> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where_line = "line " + std::to_string(line_no);
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ScenarioError(where_line + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
        throw ScenarioError(where_line + ": unknown section [" + section + "]");
      }
      if (!seen_sections.insert(section).second) {
        throw ScenarioError(where_line + ": duplicate section [" + section + "]");
      }
      if (section == "sweep") s.sweep.emplace();
      if (section == "control") s.control.emplace();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ScenarioError(where_line + ": expected key = value");
    if (section.empty()) throw ScenarioError(where_line + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string where = where_line + ": [" + section + "] " + key;
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) {
      return k.section == section && k.name == key;
    });
    if (it == table.end()) throw ScenarioError(where_line + ": unknown key '" + key + "' in [" + section + "]");
    if (!seen.emplace(section, key).second) throw ScenarioError(where + ": duplicate key");
    it->set(s, value, where);
  }

  for (const auto& k : keys()) {
    if (!k.required || !seen_sections.count(k.section)) continue;
    if (!seen.count({k.section, k.name})) {
      throw ScenarioError("[" + k.section + "] missing required key '" + k.name + "'");
    }
  }
  for (const char* sec : {"params", "initial"}) {
    if (!seen_sections.count(sec)) throw ScenarioError(std::string("missing section [") + sec + "]");
  }
  s.validate();
  return s;
}

Scenario parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

Scenario load_scenario(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ScenarioError("cannot open scenario file '" + file + "'");
  try {
    return parse_scenario(in);
  } catch (const ScenarioError& e) {
    throw ScenarioError(file + ": " + e.what());
  }
}

std::string serialize(const Scenario& s) {
  std::string out;
  std::string current;
  for (const auto& k : keys()) {
    if (!section_present(s, k.section)) continue;
    const auto value = k.get(s);
    if (!value) continue;
    if (k.section != current) {
      if (!current.empty()) out += "\n";
      out += "[" + k.section + "]\n";
      current = k.section;
    }
    out += k.name + " = " + *value + "\n";
  }
  return out;
}

std::string one_line(const Scenario& s) {
  std::string out;
  std::string current;
  for (const auto& k : keys()) {
    if (!section_present(s, k.section)) continue;
    const auto value = k.get(s);
    if (!value) continue;
    if (k.section != current) {
      if (!current.empty()) out += " ";
      out += "[" + k.section + "]";
      current = k.section;
    }
    out += " " + k.name + "=" + *value;
  }
  return out;
}

void Scenario::validate() const {
  auto wrap = [](const char* block, auto&& check) {
    try {
      check();
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScenarioError(std::string("[") + block + "] " + e.what());
    }
  };
  wrap("params", [&] { params.validate(); });
  wrap("initial", [&] { require_in_domain(initial); });
  wrap("integrator", [&] { integrator.validate(); });
  if (run.n_paths < 1) throw ScenarioError("[run] n_paths must be >= 1");
  if (sweep) {
    if (sweep->n_per_cell < 1) throw ScenarioError("[sweep] n_per_cell must be >= 1");
    for (double v : sweep->x0) {
      if (!(v >= 0.0 && v <= 1.0)) throw ScenarioError("[sweep] x0 values must lie in [0, 1]");
    }
    for (const auto* axis : {&sweep->sigma2_sq, &sweep->sigma3_sq}) {
      for (double v : *axis) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw ScenarioError("[sweep] noise variances must be finite and >= 0");
        }
      }
    }
    if (!(sweep->terminal_threshold > 0.0 && sweep->terminal_threshold < 1.0)) {
      throw ScenarioError("[sweep] terminal_threshold must lie in (0, 1)");
    }
  }
  if (control) {
    wrap("control", [&] { control_problem().validate(); });
    wrap("control", [&] { sweep_config().validate(); });
  }
  const auto& e = estimators;
  if (!(e.burn_in_fraction >= 0.0 && e.burn_in_fraction < 1.0)) {
    throw ScenarioError("[estimators] burn_in_fraction must lie in [0, 1)");
  }
  if (!(e.flat_tolerance > 0.0)) throw ScenarioError("[estimators] flat_tolerance must be > 0");
  if (!(0.0 <= e.window_lo && e.window_lo < e.window_hi && e.window_hi <= 1.0)) {
    throw ScenarioError("[estimators] window must satisfy 0 <= window_lo < window_hi <= 1");
  }
}

ControlProblem Scenario::control_problem() const {
  if (!control) throw ScenarioError("scenario has no [control] section");
  ControlProblem p;
  p.params = params;
  p.weights = control->weights;
  p.u_max = control->u_max;
  p.t_final = control->t_final;
  p.initial = initial;
  return p;
}

SweepConfig Scenario::sweep_config() const {
  if (!control) throw ScenarioError("scenario has no [control] section");
  SweepConfig c;
  c.n_noise_paths = control->n_noise_paths;
  c.n_eval_paths = control->n_eval_paths;
  c.max_iters = control->max_iters;
  c.relaxation = control->relaxation;
  c.tolerance = control->tolerance;
  c.dt = control->dt.value_or(integrator.dt);
  c.scheme = integrator.scheme;
  c.clamp_epsilon = integrator.clamp_epsilon;
  c.master_seed = run.seed;
  c.costate_form = control->costate_form;
  return c;
}

SweepSetup Scenario::sweep_setup() const {
  if (!sweep) throw ScenarioError("scenario has no [sweep] section");
  SweepSetup setup;
  setup.base = params;
  setup.S0 = initial.S;
  setup.I0 = initial.I;
  setup.config = integrator;
  setup.n_per_cell = sweep->n_per_cell;
  setup.master_seed = run.seed;
  setup.terminal_threshold = sweep->terminal_threshold;
  return setup;
}

AbsorptionGrid Scenario::sweep_grid() const {
  if (!sweep) throw ScenarioError("scenario has no [sweep] section");
  return {sweep->sigma2_sq, sweep->sigma3_sq, sweep->x0};
}

TailOptions Scenario::tail_options() const {
  return {estimators.flat_tolerance, estimators.window_lo, estimators.window_hi};
}

}  // namespace vaxsde
