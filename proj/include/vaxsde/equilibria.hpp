#pragma once

// Closed-form analysis: reproduction numbers, the five drift equilibria and
// their existence regions, and evaluators for the stability conditions and
// bounds. All inequalities are strict and evaluated on doubles without slack;
// a boundary case maps to "absent" or Indeterminate.

#include <optional>
#include <string>
#include <vector>

#include "vaxsde/model.hpp"

namespace vaxsde {

/// A single evaluated inequality `lhs <relation> rhs`, kept so callers can
/// re-check the arithmetic.
struct Inequality {
  std::string text;
  double lhs = 0.0;
  std::string relation;  // "<", "<=", ">", ">="
  double rhs = 0.0;
  bool holds = false;
};

Inequality make_inequality(std::string text, double lhs, std::string relation, double rhs);

struct Thresholds {
  double r0 = 0.0;
  double r0s = 0.0;
  std::optional<double> s_d;    // requires 1 - 2 sigma1^2/(beta r0) >= 0 and r0s > 1
  std::optional<double> hit_s;  // 1 - s_d
};

Thresholds thresholds(const ModelParams& p);

/// (delta, omega) coordinates where both boundaries of a region pair meet.
struct RegionCorner {
  double delta = 0.0;
  double omega = 0.0;
};

struct EquilibriumReport {
  State e1{0.0, 0.0, 1.0};
  State e2{1.0, 0.0, 0.0};

  std::optional<double> x3;  // formula value; absent when the denominator vanishes
  std::optional<State> e3;
  bool in_r31 = false;
  bool in_r32 = false;
  RegionCorner r3_corner;
  std::string e3_reason;

  std::optional<State> e4;

  std::optional<double> x5;
  std::optional<State> e5;
  bool in_r51 = false;
  bool in_r52 = false;
  RegionCorner r5_corner;
  std::string e5_reason;
};

EquilibriumReport equilibrium_report(const ModelParams& p);

enum class ExtinctionCondition { CI, CII, None };
const char* to_string(ExtinctionCondition c);

struct ExtinctionVerdict {
  ExtinctionCondition condition = ExtinctionCondition::None;
  /// Almost-sure upper bound on limsup (1/t) log I(t) under the holding condition.
  std::optional<double> rate_bound;
  std::vector<Inequality> checks;
};

ExtinctionVerdict extinction_check(const ModelParams& p);

enum class LogisticClass { ToZero, ToOne, Bistable, Indeterminate };
const char* to_string(LogisticClass c);

/// L(x0, I0) = -kappa (sigma2^2 - sigma3^2)/2 - delta - omega + 2 delta x0 + I0
double logistic_rate(const ModelParams& p, double x0, double I0);

struct LogisticVerdict {
  double l_at_zero = 0.0;  // L(0, I0)
  double l_at_one = 0.0;   // L(1, 0)
  LogisticClass classification = LogisticClass::Indeterminate;
};

LogisticVerdict logistic_classifier(const ModelParams& p, double I0);

/// Limits of temporal means given the limiting mean x0 of x.
struct EndemicMeanBounds {
  bool applicable = false;  // r0s > 1
  std::string reason;
  double s_mean_lower = 0.0;  // mu (1-x0)/(mu+beta), or the part-3 bound when larger
  double s_mean_upper = 0.0;  // min(1-x0, 1/r0s)
  double i_mean_lower = 0.0;  // mu/(mu+gamma) [1 - 1/r0s - x0], floored at 0
  bool i_mean_lower_from_part2 = false;
  std::optional<double> i_mean_upper;
  std::string i_mean_upper_reason;
  std::optional<double> i_mean_exact;  // sigma1^2 = 0 and r0 > 1
};

EndemicMeanBounds endemic_mean_bounds(const ModelParams& p, double x0);

/// Brackets on liminf/limsup of S and I given liminf/limsup of x.
struct PathwiseBounds {
  bool applicable = false;
  std::string reason;
  double s_d = 0.0;
  double hit_s = 0.0;
  double s_sup_upper = 0.0;  // limsup S <= 1 - x_inf
  double i_inf_upper = 0.0;  // liminf I <= (1 - s_d - x_inf) mu/(mu+gamma)
  double i_sup_lower = 0.0;  // (1 - s_d - x_sup) mu/(mu+gamma) <= limsup I
  double i_sup_upper = 0.0;  // limsup I <= 1 - s_d
  bool full_uptake_degenerate = false;  // x_sup = 1: I -> 0 and S -> 0
};

PathwiseBounds pathwise_bounds(const ModelParams& p, double x_inf, double x_sup);

struct DeviationBound {
  double m = 0.0;
  double bound = 0.0;
  double s_center = 0.0;  // mu S_e / (mu - eta)
  double eta = 0.0;       // (1/2) ((2 mu + gamma)/beta) sigma1^2 I_e
};

/// Bound on the limiting time average of the squared deviation from an
/// interior endemic equilibrium. Throws RegimeError naming a violated
/// precondition.
DeviationBound deviation_bound(const ModelParams& p, const State& equilibrium);

struct ConditionVerdicts {
  ExtinctionVerdict extinction;
  LogisticVerdict logistic;
  EndemicMeanBounds endemic;
  PathwiseBounds pathwise;
  std::optional<DeviationBound> deviation;
  std::string deviation_reason;
};

}  // namespace vaxsde
