#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <vector>

#include "overparam/core/numerics.hpp"
#include "overparam/core/rng.hpp"
#include "overparam/nets/three_layer.hpp"

namespace overparam {

/// Sign changes between init weights (W0, V0) and (W0 + Wpert, V0 + Vpert) at one input.
struct CouplingReport {
  Index m1 = 0, m2 = 0;
  double tau_w = 0;  // ||Wpert||_{2,4}
  double tau_v = 0;  // ||Vpert||_F
  std::uint64_t seed = 0;
  Index flips1 = 0, flips2 = 0;
  double output_gap = 0;  // max_r |pseudo_r - f_r| at the perturbed weights, init signs frozen
};

inline const char* kCouplingHeader = "m1,m2,tau_w,tau_v,seed,flips1,flips2,output_gap";

inline void write_coupling_row(std::ostream& os, const CouplingReport& r) {
  os << r.m1 << ',' << r.m2 << ',' << r.tau_w << ',' << r.tau_v << ',' << r.seed << ',' << r.flips1 << ','
     << r.flips2 << ',' << r.output_gap << '\n';
}

inline CouplingReport count_sign_flips(const ThreeLayerNet<double>& net, const Vector& x, const Matrix& Wpert,
                                       const Matrix& Vpert) {
  require_input(Wpert.rows() == net.m1() && Wpert.cols() == net.d(), "count_sign_flips: Wpert shape mismatch");
  require_input(Vpert.rows() == net.m2() && Vpert.cols() == net.m1(), "count_sign_flips: Vpert shape mismatch");
  require_input(x.size() == net.d(), "count_sign_flips: input dimension mismatch");
  const Matrix W = net.w0 + Wpert, V = net.v0 + Vpert;
  const SignPattern init = sign_pattern_at(net, x, net.w0, net.v0);
  const SignPattern pert = sign_pattern_at(net, x, W, V);
  CouplingReport r;
  r.m1 = net.m1();
  r.m2 = net.m2();
  r.tau_w = row_lp_norm(Wpert, 4.0);
  r.tau_v = Vpert.norm();
  r.seed = net.seed;
  r.flips1 = static_cast<Index>((init.dw.array() != pert.dw.array()).count());
  r.flips2 = static_cast<Index>((init.dv.array() != pert.dv.array()).count());
  const Matrix X = x.transpose();
  ThreeLayerCache<double> c;
  const Matrix real = three_layer_forward(W, V, net.b1, net.b2, net.a, net.lambda, X, c);
  const Matrix pseudo = three_layer_pseudo(W, V, net.b1, net.b2, net.a, net.lambda, X, init, BiasMode::Full);
  r.output_gap = (real - pseudo).cwiseAbs().maxCoeff();
  return r;
}

/// First-layer perturbation that flips as many layer-1 signs at x as a row-l4 budget allows.
/// Neurons are taken in order of |z_i| (z = W0 x + b1) and pushed to -kappa z_i along x, at a
/// cost of ((1 + kappa) |z_i| / ||x||)^4 each, until sum ||w'_i||^4 would exceed tau^4.
inline Matrix adversarial_first_layer(const ThreeLayerNet<double>& net, const Vector& x, double tau,
                                      double kappa = 0.01) {
  require_input(tau >= 0.0 && kappa > 0.0, "adversarial_first_layer: need tau >= 0, kappa > 0");
  const double xx = x.squaredNorm();
  require_input(xx > 0.0, "adversarial_first_layer: x must be nonzero");
  const Vector z = net.w0 * x + net.b1;
  std::vector<Index> order(static_cast<std::size_t>(z.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return std::abs(z(a)) < std::abs(z(b)); });
  Matrix Wp = Matrix::Zero(net.m1(), net.d());
  const double budget = std::pow(tau, 4);
  double used = 0;
  for (Index i : order) {
    // w'_i = -(1 + kappa) z_i x / ||x||^2 moves the pre-activation to -kappa z_i
    const Vector row = (-(1 + kappa) * z(i) / xx) * x;
    const double cost = std::pow(row.norm(), 4);
    if (used + cost > budget) break;
    used += cost;
    Wp.row(i) = row.transpose();
  }
  return Wp;
}

/// Gaussian perturbation rescaled so that ||W||_{2,4} = tau.
inline Matrix random_row_l4_perturbation(Index rows, Index cols, double tau, RngStream& rng) {
  Matrix W = sample_gaussian_matrix<double>(rows, cols, 1.0, rng);
  const double n = row_lp_norm(W, 4.0);
  return n > 0 ? Matrix(W * (tau / n)) : W;
}

}  // namespace overparam
