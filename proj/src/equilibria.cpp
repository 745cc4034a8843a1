#include "vaxsde/equilibria.hpp"

#include <algorithm>
#include <cmath>

namespace vaxsde {

Inequality make_inequality(std::string text, double lhs, std::string relation, double rhs) {
  bool holds = false;
  if (relation == "<") holds = lhs < rhs;
  else if (relation == "<=") holds = lhs <= rhs;
  else if (relation == ">") holds = lhs > rhs;
  else if (relation == ">=") holds = lhs >= rhs;
  else throw std::invalid_argument("unknown relation " + relation);
  return {std::move(text), lhs, std::move(relation), rhs, holds};
}

Thresholds thresholds(const ModelParams& p) {
  p.validate();
  Thresholds t;
  t.r0 = p.beta / (p.mu + p.gamma);
  t.r0s = p.beta / (p.mu + p.gamma + 0.5 * p.sigma1_sq);
  const double disc = 1.0 - 2.0 * p.sigma1_sq / (p.beta * t.r0);
  if (disc >= 0.0 && t.r0s > 1.0) {
    t.s_d = (1.0 / t.r0) * 2.0 / (1.0 + std::sqrt(disc));
    t.hit_s = 1.0 - *t.s_d;
  }
  return t;
}

EquilibriumReport equilibrium_report(const ModelParams& p) {
  p.validate();
  const Thresholds th = thresholds(p);
  const double k = p.kappa;
  const double a = k * p.sigma3_sq - p.delta - p.omega;     // numerator of x3
  const double b = k * p.sigma_sq() - 2.0 * p.delta;        // denominator of x3
  const double c = p.mu / (p.mu + p.gamma);
  const double inv_r0 = 1.0 / th.r0;

  EquilibriumReport r;

  // E3 = (1 - x3, 0, x3)
  r.in_r31 = p.delta - k * p.sigma2_sq < p.omega && p.omega < k * p.sigma3_sq - p.delta;
  r.in_r32 = k * p.sigma3_sq - p.delta < p.omega && p.omega < p.delta - k * p.sigma2_sq;
  r.r3_corner = {0.5 * k * p.sigma_sq(), 0.5 * k * (p.sigma3_sq - p.sigma2_sq)};
  if (b == 0.0) {
    r.e3_reason = "degenerate denominator";
  } else {
    r.x3 = a / b;
    if ((r.in_r31 || r.in_r32) && *r.x3 >= 0.0 && *r.x3 <= 1.0) {
      r.e3 = State{1.0 - *r.x3, 0.0, *r.x3};
    } else {
      r.e3_reason = "(delta, omega) outside R3,1 and R3,2";
    }
  }

  // E4, E5 need r0 > 1
  const double low5 = -k * p.sigma2_sq + inv_r0 * k * p.sigma_sq() + p.delta * (1.0 - 2.0 * inv_r0);
  const double high5 = -p.delta + c * (1.0 - inv_r0) + k * p.sigma3_sq;
  r.in_r51 = low5 < p.omega && p.omega < high5;
  r.in_r52 = high5 < p.omega && p.omega < low5;
  r.r5_corner = {0.5 * c + 0.5 * k * p.sigma_sq(),
                 0.5 * c * (1.0 - 2.0 * inv_r0) + 0.5 * k * (p.sigma3_sq - p.sigma2_sq)};

  const double denom5 = p.mu + b * (p.mu + p.gamma);
  if (denom5 != 0.0) {
    r.x5 = (p.mu * (1.0 - inv_r0) + a * (p.mu + p.gamma)) / denom5;
  }
  if (th.r0 > 1.0) {
    r.e4 = State{inv_r0, c * (1.0 - inv_r0), 0.0};
    if (!r.x5) {
      r.e5_reason = "degenerate denominator";
    } else if (r.in_r51 || r.in_r52) {
      r.e5 = State{inv_r0, c * (1.0 - inv_r0 - *r.x5), *r.x5};
    } else {
      r.e5_reason = "(delta, omega) outside R5,1 and R5,2";
    }
  } else {
    r.e5_reason = "r0 <= 1";
  }
  return r;
}

const char* to_string(ExtinctionCondition c) {
  switch (c) {
    case ExtinctionCondition::CI: return "CI";
    case ExtinctionCondition::CII: return "CII";
    default: return "None";
  }
}

ExtinctionVerdict extinction_check(const ModelParams& p) {
  const Thresholds th = thresholds(p);
  ExtinctionVerdict v;
  const auto c2_r0s = make_inequality("R0s < 1", th.r0s, "<", 1.0);
  const auto c2_noise = make_inequality("sigma1^2 <= beta", p.sigma1_sq, "<=", p.beta);
  const auto c1 = make_inequality("sigma1^2/beta > max(1, R0/2)", p.sigma1_sq / p.beta, ">",
                                  std::max(1.0, th.r0 / 2.0));
  v.checks = {c2_r0s, c2_noise, c1};
  if (c2_r0s.holds && c2_noise.holds) {
    v.condition = ExtinctionCondition::CII;
    v.rate_bound = -(p.mu + p.gamma + 0.5 * p.sigma1_sq) * (1.0 - th.r0s);
  } else if (c1.holds) {
    v.condition = ExtinctionCondition::CI;
    v.rate_bound = -(p.beta * (p.mu + p.gamma) / p.sigma1_sq) * (p.sigma1_sq / p.beta - th.r0 / 2.0);
  }
  return v;
}

const char* to_string(LogisticClass c) {
  switch (c) {
    case LogisticClass::ToZero: return "ToZero";
    case LogisticClass::ToOne: return "ToOne";
    case LogisticClass::Bistable: return "Bistable";
    default: return "Indeterminate";
  }
}

double logistic_rate(const ModelParams& p, double x0, double I0) {
  return -p.kappa * (p.sigma2_sq - p.sigma3_sq) / 2.0 - p.delta - p.omega + 2.0 * p.delta * x0 + I0;
}

LogisticVerdict logistic_classifier(const ModelParams& p, double I0) {
  if (!(I0 >= 0.0 && I0 <= 1.0)) throw DomainError("I0 must lie in [0,1]");
  LogisticVerdict v;
  v.l_at_zero = logistic_rate(p, 0.0, I0);
  v.l_at_one = logistic_rate(p, 1.0, 0.0);
  if (v.l_at_zero < 0.0 && v.l_at_one < 0.0) {
    v.classification = LogisticClass::ToZero;
  } else if (v.l_at_zero > 0.0 && v.l_at_one > 0.0) {
    v.classification = LogisticClass::ToOne;
  } else if (v.l_at_zero < 0.0 && v.l_at_one > 0.0) {
    v.classification = LogisticClass::Bistable;
  } else {
    v.classification = LogisticClass::Indeterminate;
  }
  return v;
}

EndemicMeanBounds endemic_mean_bounds(const ModelParams& p, double x0) {
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw DomainError("x0 must lie in [0,1]");
  const Thresholds th = thresholds(p);
  EndemicMeanBounds b;
  const double c = p.mu / (p.mu + p.gamma);
  if (!(th.r0s > 1.0)) {
    b.reason = "requires R0s > 1";
    return b;
  }
  b.applicable = true;
  b.s_mean_lower = p.mu * (1.0 - x0) / (p.mu + p.beta);
  b.s_mean_upper = std::min(1.0 - x0, 1.0 / th.r0s);

  const double part2 = c * (1.0 - 1.0 / th.r0s - x0);
  b.i_mean_lower_from_part2 = x0 < 1.0 - 1.0 / th.r0s;
  b.i_mean_lower = b.i_mean_lower_from_part2 ? part2 : 0.0;

  if (!(p.beta > p.sigma1_sq)) {
    b.i_mean_upper_reason = "requires beta > sigma1^2";
  } else {
    const double scaled = p.beta / (p.beta - p.sigma1_sq) * (1.0 - 1.0 / th.r0s);
    if (x0 < scaled) {
      b.i_mean_upper = c * (scaled - x0);
      b.s_mean_lower = std::max(b.s_mean_lower, 1.0 - scaled);
    } else {
      b.i_mean_upper_reason = "requires x0 < beta/(beta - sigma1^2) (1 - 1/R0s)";
    }
  }
  if (p.sigma1_sq == 0.0 && th.r0 > 1.0) {
    b.i_mean_exact = std::max(0.0, c * (1.0 - 1.0 / th.r0 - x0));
  }
  return b;
}

PathwiseBounds pathwise_bounds(const ModelParams& p, double x_inf, double x_sup) {
  if (!(x_inf >= 0.0 && x_sup <= 1.0 && x_inf <= x_sup)) {
    throw DomainError("need 0 <= x_inf <= x_sup <= 1");
  }
  const Thresholds th = thresholds(p);
  PathwiseBounds b;
  if (!(th.r0s > 1.0)) {
    b.reason = "requires R0s > 1";
    return b;
  }
  if (!(p.sigma1_sq / p.beta < th.r0 / 2.0)) {
    b.reason = "requires sigma1^2/beta < R0/2";
    return b;
  }
  const double c = p.mu / (p.mu + p.gamma);
  b.applicable = true;
  b.s_d = *th.s_d;
  b.hit_s = *th.hit_s;
  b.s_sup_upper = 1.0 - x_inf;
  b.i_inf_upper = (1.0 - b.s_d - x_inf) * c;
  b.i_sup_lower = (1.0 - b.s_d - x_sup) * c;
  b.i_sup_upper = 1.0 - b.s_d;
  b.full_uptake_degenerate = x_sup == 1.0;
  return b;
}

DeviationBound deviation_bound(const ModelParams& p, const State& e) {
  p.validate();
  if (e.x <= 0.0 || e.x >= 1.0) {
    throw RegimeError("deviation bound requires 0 < x_e < 1");
  }
  DeviationBound d;
  const double sigma_sq = p.sigma_sq();
  d.eta = 0.5 * ((2.0 * p.mu + p.gamma) / p.beta) * p.sigma1_sq * e.I;
  if (!(d.eta < p.mu)) {
    throw RegimeError("deviation bound requires (1/2)((2 mu + gamma)/beta) sigma1^2 I_e < mu");
  }
  if (!(p.delta < 0.25 * p.kappa * sigma_sq)) {
    throw RegimeError("deviation bound requires delta < kappa (sigma2^2 + sigma3^2)/4");
  }
  const double damp = p.mu - d.eta;
  d.m = std::min({damp, p.mu + p.gamma, p.mu * (0.5 * p.kappa * sigma_sq - 2.0 * p.delta)});
  d.s_center = p.mu * e.S / damp;
  d.bound = (p.mu * p.mu * e.S * e.S / damp + 0.5 * p.mu * p.kappa * sigma_sq * e.x * (1.0 - e.x) +
             p.mu * e.x + p.mu * e.S * (1.0 - e.S)) /
            d.m;
  return d;
}

}  // namespace vaxsde
