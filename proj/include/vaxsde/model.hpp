#pragma once

// Coupled stochastic SIR / stochastic replicator model of vaccine uptake.
//
//   dS = [mu(1-x) - beta S I - mu S] dt - sigma1 S I dW1
//   dI = [beta S I - (mu+gamma) I] dt   + sigma1 S I dW1
//   dx = kappa x(1-x) [-omega(1-u) + I + delta(2x-1)
//                      + kappa(sigma3^2 - (sigma2^2+sigma3^2) x)] dt
//        + kappa sqrt(sigma2^2+sigma3^2) x(1-x) dW2
//
// S, I are population fractions, x is the fraction of vaccinating parents and
// u in [0,1] an optional discount on the vaccination cost (u = 0 is the
// uncontrolled system).

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vaxsde {

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Epidemiological, behavioural and noise parameters. Noise magnitudes are
/// stored as variances (sigma_i^2).
struct ModelParams {
  double mu = 1.0 / 50.0;       // birth/death rate (1/year)
  double beta = 100.0;          // transmission rate (1/year)
  double gamma = 365.0 / 22.0;  // recovery rate (1/year)
  double kappa = 1.69;          // social learning rate (1/year)
  double omega = 0.0;           // vaccination cost
  double delta = 0.0;           // group pressure
  double sigma1_sq = 0.0;       // transmission noise
  double sigma2_sq = 0.0;       // vaccinator utility noise
  double sigma3_sq = 0.0;       // non-vaccinator utility noise

  /// Throws DomainError naming the first offending field.
  void validate() const;

  double sigma_sq() const { return sigma2_sq + sigma3_sq; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct State {
  double S = 0.0;
  double I = 0.0;
  double x = 0.0;

  friend bool operator==(const State&, const State&) = default;
};

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

inline Vec3 to_vec(const State& s) { return {s.S, s.I, s.x}; }
inline State to_state(const Vec3& v) { return {v[0], v[1], v[2]}; }

/// Amount by which `s` lies outside {S,I >= 0, S+I <= 1, 0 <= x <= 1}
/// (0 when inside).
double domain_violation(const State& s);

/// Throws DomainError when domain_violation(s) > tol.
void require_in_domain(const State& s, double tol = 1e-12);

struct DriftVector {
  Vec3 value{};
  double dS() const { return value[0]; }
  double dI() const { return value[1]; }
  double dx() const { return value[2]; }
};

/// Column k holds the loading of the state on the independent driver W_{k+1}.
struct DiffusionMatrix {
  std::array<Vec3, 2> columns{};
  double operator()(int row, int col) const { return columns[col][row]; }
};

/// Per driver k: jacobian[k][i][j] = d G_{ik} / d y_j with y = (S, I, x).
using DiffusionJacobian = std::array<Mat3, 2>;

struct Payoffs {
  double v12 = 0.0;  // vaccinator against non-vaccinator: -omega + delta x
  double v21 = 0.0;  // non-vaccinator against vaccinator: -I + delta (1-x)
};

Payoffs payoffs(double x, double I, const ModelParams& p);

DriftVector drift(const State& s, const ModelParams& p, double u = 0.0);
DiffusionMatrix diffusion(const State& s, const ModelParams& p);
DiffusionJacobian diffusion_state_jacobian(const State& s, const ModelParams& p);

/// Replicator drift written through the payoff difference and the mutation
/// term: kappa x(1-x) [v12 - v21 + kappa sigma3^2 (1-x) - kappa sigma2^2 x].
double replicator_drift_from_payoffs(double x, double I, const ModelParams& p);

namespace detail {

// Unchecked kernels shared by the integrator and the public entry points.

inline double replicator_bracket(double I, double x, const ModelParams& p, double u) {
  return -p.omega * (1.0 - u) + I + p.delta * (2.0 * x - 1.0) +
         p.kappa * (p.sigma3_sq - (p.sigma2_sq + p.sigma3_sq) * x);
}

inline Vec3 drift(const Vec3& y, const ModelParams& p, double u) {
  const double S = y[0], I = y[1], x = y[2];
  const double infection = p.beta * S * I;
  return {p.mu * (1.0 - x) - infection - p.mu * S,
          infection - (p.mu + p.gamma) * I,
          p.kappa * x * (1.0 - x) * replicator_bracket(I, x, p, u)};
}

/// Square roots of the noise variances, taken once per evaluation site.
struct NoiseScales {
  double sigma1 = 0.0;
  double replicator = 0.0;  // kappa sqrt(sigma2^2 + sigma3^2)

  explicit NoiseScales(const ModelParams& p)
      : sigma1(std::sqrt(p.sigma1_sq)), replicator(p.kappa * std::sqrt(p.sigma_sq())) {}
};

inline std::array<Vec3, 2> diffusion(const Vec3& y, const NoiseScales& n) {
  const double si = n.sigma1 * y[0] * y[1];
  return {Vec3{-si, si, 0.0}, Vec3{0.0, 0.0, n.replicator * y[2] * (1.0 - y[2])}};
}

inline DiffusionJacobian diffusion_jacobian(const Vec3& y, const NoiseScales& n) {
  const double S = y[0], I = y[1], x = y[2];
  DiffusionJacobian J{};
  // column 1: (-s1 S I, s1 S I, 0)
  J[0][0] = {-n.sigma1 * I, -n.sigma1 * S, 0.0};
  J[0][1] = {n.sigma1 * I, n.sigma1 * S, 0.0};
  J[0][2] = {0.0, 0.0, 0.0};
  // column 2: (0, 0, c x(1-x))
  J[1][0] = {0.0, 0.0, 0.0};
  J[1][1] = {0.0, 0.0, 0.0};
  J[1][2] = {0.0, 0.0, n.replicator * (1.0 - 2.0 * x)};
  return J;
}

}  // namespace detail

}  // namespace vaxsde
