#pragma once

#include "overparam/core/rng.hpp"
#include "overparam/nets/three_layer.hpp"
#include "overparam/train/loss.hpp"

namespace overparam {

struct RegParams {
  double lambda_w = 0.0;
  double lambda_v = 0.0;
};

struct SmoothingParams {
  double sigma_w = 0.0;
  double sigma_v = 0.0;
};

/// R(sqrt(l) W', sqrt(l) V') = lambda_w l^2 ||W'||_{2,4}^4 + lambda_v l ||V'||_F^2
template <class S>
double regularizer(const ThreeLayerNet<S>& net, const RegParams& reg) {
  const double l = net.lambda;
  return reg.lambda_w * l * l * row_l4_pow4(net.w_delta) +
         reg.lambda_v * l * net.v_delta.template cast<double>().squaredNorm();
}

/// Adds the regularizer gradient with respect to (W', V').
template <class S>
void add_regularizer_grad(const ThreeLayerNet<S>& net, const RegParams& reg, MatrixT<S>& gW, MatrixT<S>& gV) {
  const double l = net.lambda;
  if (reg.lambda_w != 0.0) {
    const VectorT<S> sq = net.w_delta.rowwise().squaredNorm();
    const S c = static_cast<S>(4.0 * reg.lambda_w * l * l);
    gW.array() += (net.w_delta.array().colwise() * sq.array()) * c;
  }
  if (reg.lambda_v != 0.0) gV += static_cast<S>(2.0 * reg.lambda_v * l) * net.v_delta;
}

/// One realization of the objective's randomness: smoothing matrices and, for the
/// second objective, the sign diagonal Sigma. An empty sigma means the identity.
template <class S>
struct NoiseDraw {
  MatrixT<S> w_rho;
  MatrixT<S> v_rho;
  VectorT<S> sigma;
};

template <class S>
NoiseDraw<S> draw_smoothing(const ThreeLayerNet<S>& net, const SmoothingParams& sm, RngStream& rng) {
  NoiseDraw<S> nd;
  nd.w_rho = sample_gaussian_matrix<S>(net.m1(), net.d(), sm.sigma_w * sm.sigma_w, rng);
  nd.v_rho = sample_gaussian_matrix<S>(net.m2(), net.m1(), sm.sigma_v * sm.sigma_v, rng);
  return nd;
}

/// Effective weights W0 + W^rho + Sigma W', V0 + V^rho + V' Sigma.
template <class S>
void effective_weights(const ThreeLayerNet<S>& net, const NoiseDraw<S>& nd, MatrixT<S>& W, MatrixT<S>& V) {
  if (nd.sigma.size() == 0) {
    W = net.w0 + nd.w_rho + net.w_delta;
    V = net.v0 + nd.v_rho + net.v_delta;
  } else {
    require_input(nd.sigma.size() == net.m1(), "objective: sigma size mismatch");
    W = net.w0 + nd.w_rho + nd.sigma.asDiagonal() * net.w_delta;
    V = net.v0 + nd.v_rho + net.v_delta * nd.sigma.asDiagonal();
  }
}

/// Mean loss over the rows of (X, Y) at the noisy weights, plus the regularizer.
/// When gW/gV are given they receive the gradient with respect to (W', V').
template <class S>
double objective_value_and_grad(const ThreeLayerNet<S>& net, const MatrixT<S>& X, const MatrixT<S>& Y,
                                const LossFn& loss, const RegParams& reg, const NoiseDraw<S>& nd,
                                MatrixT<S>* gW = nullptr, MatrixT<S>* gV = nullptr) {
  MatrixT<S> W, V;
  effective_weights(net, nd, W, V);
  ThreeLayerCache<S> c;
  const MatrixT<S> P = three_layer_forward(W, V, net.b1, net.b2, net.a, net.lambda, X, c);
  const double inv = 1.0 / static_cast<double>(X.rows());
  MatrixT<S> G;
  const double value = loss.batch(P, Y, gW ? &G : nullptr, inv) * inv + regularizer(net, reg);
  if (gW) {
    MatrixT<S> dW, dV;
    three_layer_backward(V, net.a, net.lambda, X, c, G, dW, dV);
    if (nd.sigma.size() == 0) {
      *gW = std::move(dW);
      *gV = std::move(dV);
    } else {
      *gW = nd.sigma.asDiagonal() * dW;
      *gV = dV * nd.sigma.asDiagonal();
    }
    add_regularizer_grad(net, reg, *gW, *gV);
  }
  return value;
}

/// First objective with fresh smoothing noise.
template <class S>
double objective_L1(const ThreeLayerNet<S>& net, const VectorT<S>& x, const VectorT<S>& y, const LossFn& loss,
                    const RegParams& reg, const SmoothingParams& sm, RngStream& rng) {
  const auto nd = draw_smoothing(net, sm, rng);
  return objective_value_and_grad<S>(net, x.transpose(), y.transpose(), loss, reg, nd);
}

/// Second objective: as the first, with the increments applied as Sigma W' and V' Sigma.
template <class S>
double objective_L2(const ThreeLayerNet<S>& net, const VectorT<S>& x, const VectorT<S>& y, const LossFn& loss,
                    const RegParams& reg, const SmoothingParams& sm, const VectorT<S>& sigma, RngStream& rng) {
  auto nd = draw_smoothing(net, sm, rng);
  nd.sigma = sigma;
  return objective_value_and_grad<S>(net, x.transpose(), y.transpose(), loss, reg, nd);
}

}  // namespace overparam
