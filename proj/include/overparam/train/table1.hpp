#pragma once

#include <cmath>

#include "overparam/core/error.hpp"

namespace overparam {

/// Three-layer hyperparameter helper. Every hidden constant is 1; see
/// docs/parameter_helper.md for the formula sheet. Values are starting points for
/// a run, not a claim about the asymptotic regime.
struct Table1Params {
  // inputs, echoed back
  double m = 0, eps0 = 0, gamma = 0, C0 = 0;
  // outputs
  double tau_w_prime = 0;  // bound on ||W'||_{2,4} once the regularizer is O(eps0)
  double tau_v_prime = 0;  // bound on ||V'||_F
  double lambda_w = 0;     // weight of ||.||_{2,4}^4
  double lambda_v = 0;     // weight of ||.||_F^2
  double sigma_w = 0;      // smoothing std on W
  double sigma_v = 0;      // smoothing std on V
};

/// Direction when m doubles: tau'_w, tau'_v, sigma_w, sigma_v decrease; lambda_w, lambda_v increase.
inline Table1Params table1_params(double m, double eps0, double gamma, double C0) {
  if (!(m > 0 && eps0 > 0 && gamma > 0 && C0 > 0)) throw InvalidParameter("table1_params: inputs must be positive");
  Table1Params p;
  p.m = m;
  p.eps0 = eps0;
  p.gamma = gamma;
  p.C0 = C0;
  p.tau_w_prime = C0 * std::pow(m, -0.75 + 0.005);
  p.tau_v_prime = C0 * std::pow(m, -0.005);
  p.lambda_w = eps0 / std::pow(p.tau_w_prime, 4);
  p.lambda_v = eps0 / (p.tau_v_prime * p.tau_v_prime);
  p.sigma_w = p.tau_w_prime * std::pow(m, -0.25);
  p.sigma_v = eps0 / std::sqrt(m);
  return p;
}

}  // namespace overparam
