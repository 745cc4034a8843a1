#include "vaxsde/model.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace vaxsde {

namespace {

void require_field(bool ok, const char* field, const char* rule, double value) {
  if (!ok) {
    throw DomainError(std::string("parameter ") + field + " must be " + rule + " (got " +
                      std::to_string(value) + ")");
  }
}

}  // namespace

void ModelParams::validate() const {
  require_field(std::isfinite(mu) && mu > 0.0, "mu", "> 0", mu);
  require_field(std::isfinite(beta) && beta > 0.0, "beta", "> 0", beta);
  require_field(std::isfinite(gamma) && gamma > 0.0, "gamma", "> 0", gamma);
  require_field(std::isfinite(kappa) && kappa > 0.0, "kappa", "> 0", kappa);
  require_field(std::isfinite(omega) && omega >= 0.0, "omega", ">= 0", omega);
  require_field(std::isfinite(delta) && delta >= 0.0, "delta", ">= 0", delta);
  require_field(std::isfinite(sigma1_sq) && sigma1_sq >= 0.0, "sigma1_sq", ">= 0", sigma1_sq);
  require_field(std::isfinite(sigma2_sq) && sigma2_sq >= 0.0, "sigma2_sq", ">= 0", sigma2_sq);
  require_field(std::isfinite(sigma3_sq) && sigma3_sq >= 0.0, "sigma3_sq", ">= 0", sigma3_sq);
}

double domain_violation(const State& s) {
  if (!std::isfinite(s.S) || !std::isfinite(s.I) || !std::isfinite(s.x)) {
    return std::numeric_limits<double>::infinity();
  }
  double v = 0.0;
  v = std::max(v, -s.S);
  v = std::max(v, -s.I);
  v = std::max(v, s.S + s.I - 1.0);
  v = std::max(v, -s.x);
  v = std::max(v, s.x - 1.0);
  return v;
}

void require_in_domain(const State& s, double tol) {
  const double v = domain_violation(s);
  if (v > tol) {
    throw DomainError("state (S=" + std::to_string(s.S) + ", I=" + std::to_string(s.I) +
                      ", x=" + std::to_string(s.x) + ") lies outside the solution set by " +
                      std::to_string(v));
  }
}

Payoffs payoffs(double x, double I, const ModelParams& p) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("acceptor fraction x must lie in [0,1]");
  if (!(I >= 0.0 && I <= 1.0)) throw DomainError("infected fraction I must lie in [0,1]");
  return {-p.omega + p.delta * x, -I + p.delta * (1.0 - x)};
}

DriftVector drift(const State& s, const ModelParams& p, double u) {
  require_in_domain(s);
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("control u must lie in [0,1]");
  return {detail::drift(to_vec(s), p, u)};
}

DiffusionMatrix diffusion(const State& s, const ModelParams& p) {
  require_in_domain(s);
  return {detail::diffusion(to_vec(s), detail::NoiseScales(p))};
}

DiffusionJacobian diffusion_state_jacobian(const State& s, const ModelParams& p) {
  require_in_domain(s);
  return detail::diffusion_jacobian(to_vec(s), detail::NoiseScales(p));
}

double replicator_drift_from_payoffs(double x, double I, const ModelParams& p) {
  const Payoffs v = payoffs(x, I, p);
  const double mutation = p.kappa * p.sigma3_sq * (1.0 - x) - p.kappa * p.sigma2_sq * x;
  return p.kappa * x * (1.0 - x) * (v.v12 - v.v21 + mutation);
}

}  // namespace vaxsde
