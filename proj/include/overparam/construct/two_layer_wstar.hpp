#pragma once

#include <cmath>
#include <vector>

#include <json.hpp>

#include "overparam/construct/fit_function.hpp"
#include "overparam/nets/two_layer.hpp"
#include "overparam/targets/concept.hpp"

namespace overparam {

/// Increments W* for which the init-sign pseudo network approximates the target:
///   w*_j = (1/m) sum_r sum_i (a_{r,j} / eps_a^2) a*_{r,i} h_i(sqrt(m) <w0_j, w1_i>, sqrt(m) b_j) w2_i
/// fits[i] is the fit function for target.phis[i]. Inputs are assumed unit norm.
inline Matrix construct_two_layer_Wstar(const TwoLayerTarget& target, const TwoLayerNet<double>& net,
                                        const std::vector<FitFunction>& fits, double eps) {
  target.validate();
  require_input(static_cast<Index>(fits.size()) >= target.p(), "construct_two_layer_Wstar: missing fit function");
  require_input(net.d() == target.d() && net.k() == target.k(), "construct_two_layer_Wstar: net/target shape mismatch");
  if (net.profile != InitProfile::Theory)
    throw InvalidInput("construct_two_layer_Wstar: net must use the theory init profile");
  for (Index i = 0; i < target.p(); ++i) {
    const auto& f = fits[static_cast<std::size_t>(i)];
    require_input(f.phi_name == target.phis[static_cast<std::size_t>(i)].name,
                  "construct_two_layer_Wstar: fit function does not match the target activation");
    require_input(f.eps <= eps, "construct_two_layer_Wstar: fit tolerance looser than eps");
  }
  const Index m = net.m(), p = target.p();
  const double sm = std::sqrt(static_cast<double>(m));
  const double scale = 1.0 / (static_cast<double>(m) * net.eps_a * net.eps_a);
  // coef(j, i) = sum_r a_{r,j} a*_{r,i}
  const Matrix coef = net.a.transpose() * target.astar;
  const Matrix proj = net.w0 * target.w1.transpose();  // m x p
  Matrix W = Matrix::Zero(m, net.d());
  for (Index j = 0; j < m; ++j) {
    const double b0 = sm * net.b(j);
    for (Index i = 0; i < p; ++i) {
      const double c = coef(j, i);
      if (c == 0.0) continue;
      const double hv = fits[static_cast<std::size_t>(i)](sm * proj(j, i), b0);
      W.row(j) += (scale * c * hv) * target.w2.row(i);
    }
  }
  return W;
}

/// Increment-only pseudo output with init signs: sum_j a_{r,j} 1{<w0_j,x> + b_j >= 0} <w_j, x>.
inline Matrix pseudo_increment_batch(const TwoLayerNet<double>& net, const Matrix& W, const Matrix& X) {
  require_input(W.rows() == net.m() && W.cols() == net.d() && X.cols() == net.d(),
                "pseudo_increment_batch: shape mismatch");
  // blocks of inputs keep the N x m intermediates small for wide nets
  constexpr Index kBlock = 32;
  Matrix out(X.rows(), net.k());
  for (Index s = 0; s < X.rows(); s += kBlock) {
    const Index n = std::min(kBlock, X.rows() - s);
    const auto Xb = X.middleRows(s, n);
    Matrix Z = Xb * net.w0.transpose();
    Z.rowwise() += net.b.transpose();
    Matrix L = Xb * W.transpose();
    L.array() *= indicator_of<double>(Z).array();
    out.middleRows(s, n) = L * net.a.transpose();
  }
  return out;
}

struct WstarReport {
  Index m = 0, d = 0, k = 0, p = 0;
  double eps_a = 0;
  double max_row_norm = 0;
  double normalized_row_norm = 0;  // max row norm * eps_a * m / (k p)
  double mae = 0, mae_std_err = 0;
  Index test_points = 0;
};

inline WstarReport wstar_report(const TwoLayerTarget& target, const TwoLayerNet<double>& net, const Matrix& W,
                                const Matrix& X_test) {
  WstarReport r;
  r.m = net.m();
  r.d = net.d();
  r.k = net.k();
  r.p = target.p();
  r.eps_a = net.eps_a;
  r.max_row_norm = row_lp_norm(W, kInf);
  r.normalized_row_norm = r.max_row_norm * net.eps_a * static_cast<double>(net.m()) /
                          static_cast<double>(target.k() * target.p());
  if (X_test.rows() > 0) {
    const Matrix out = pseudo_increment_batch(net, W, X_test);
    MeanAccumulator acc;
    for (Index n = 0; n < X_test.rows(); ++n) {
      const Vector y = eval_two_layer_target(target, X_test.row(n).transpose());
      acc.add((out.row(n).transpose() - y).cwiseAbs().mean());
    }
    r.mae = acc.mean;
    r.mae_std_err = acc.std_err();
    r.test_points = X_test.rows();
  }
  return r;
}

inline nlohmann::json to_json(const WstarReport& r) {
  return {{"m", r.m},
          {"d", r.d},
          {"k", r.k},
          {"p", r.p},
          {"eps_a", r.eps_a},
          {"max_row_norm", r.max_row_norm},
          {"row_norm_times_eps_a_m_over_kp", r.normalized_row_norm},
          {"mae", r.mae},
          {"mae_std_err", r.mae_std_err},
          {"test_points", r.test_points}};
}

}  // namespace overparam
