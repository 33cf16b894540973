#pragma once

#include <cstdint>

#include "overparam/core/error.hpp"
#include "overparam/core/numerics.hpp"
#include "overparam/core/rng.hpp"
#include "overparam/nets/common.hpp"

namespace overparam {

/// f_r(x) = lambda * sum_i a_{r,i} relu(<v_i, relu(W x + b1)> + b2_i)
/// with W = W0 + Wdelta and V = V0 + Vdelta. Only the deltas train; lambda is
/// kept separate from the weights so weight decay stays exact.
template <class S = double>
struct ThreeLayerNet {
  using Scalar = S;

  MatrixT<S> w0;       // m1 x d
  MatrixT<S> w_delta;  // m1 x d
  MatrixT<S> v0;       // m2 x m1
  MatrixT<S> v_delta;  // m2 x m1
  VectorT<S> b1;       // m1
  VectorT<S> b2;       // m2
  MatrixT<S> a;        // k x m2
  double lambda = 1.0;
  InitProfile profile = InitProfile::Experiment;
  std::uint64_t seed = 0;

  Index m1() const { return w0.rows(); }
  Index m2() const { return v0.rows(); }
  Index d() const { return w0.cols(); }
  Index k() const { return a.rows(); }

  MatrixT<S> weights_w() const { return w0 + w_delta; }
  MatrixT<S> weights_v() const { return v0 + v_delta; }
};

/// W0, b1 ~ N(0, 1/m1); V0, b2 ~ N(0, 1/m2); a ~ N(0, 1); lambda = 1.
/// Draw order: W0, b1, V0, b2, a.
template <class S = double>
ThreeLayerNet<S> init_three_layer(Index m1, Index m2, Index d, Index k, InitProfile profile, RngStream& rng) {
  if (m1 < 1 || m2 < 1 || d < 1 || k < 1) throw InvalidParameter("init_three_layer: dimensions must be >= 1");
  ThreeLayerNet<S> net;
  net.profile = profile;
  net.seed = rng.seed();
  const double v1 = 1.0 / static_cast<double>(m1), v2 = 1.0 / static_cast<double>(m2);
  net.w0 = sample_gaussian_matrix<S>(m1, d, v1, rng);
  net.b1 = sample_gaussian_vector<S>(m1, v1, rng);
  net.v0 = sample_gaussian_matrix<S>(m2, m1, v2, rng);
  net.b2 = sample_gaussian_vector<S>(m2, v2, rng);
  net.a = sample_gaussian_matrix<S>(k, m2, 1.0, rng);
  net.w_delta = MatrixT<S>::Zero(m1, d);
  net.v_delta = MatrixT<S>::Zero(m2, m1);
  net.lambda = 1.0;
  return net;
}

template <class S>
struct ThreeLayerCache {
  MatrixT<S> Z1, H1, Z2, H2;
};

/// Batched forward at explicit weights. X is N x d; returns N x k.
template <class S>
MatrixT<S> three_layer_forward(const MatrixT<S>& W, const MatrixT<S>& V, const VectorT<S>& b1,
                               const VectorT<S>& b2, const MatrixT<S>& a, double lambda, const MatrixT<S>& X,
                               ThreeLayerCache<S>& c) {
  require_input(X.cols() == W.cols(), "three-layer net: input dimension mismatch");
  c.Z1.resize(X.rows(), W.rows());
  c.Z1.noalias() = X * W.transpose();
  c.Z1.rowwise() += b1.transpose();
  c.H1 = relu_of<S>(c.Z1);
  c.Z2.resize(X.rows(), V.rows());
  c.Z2.noalias() = c.H1 * V.transpose();
  c.Z2.rowwise() += b2.transpose();
  c.H2 = relu_of<S>(c.Z2);
  MatrixT<S> out(X.rows(), a.rows());
  out.noalias() = c.H2 * a.transpose();
  out *= static_cast<S>(lambda);
  return out;
}

/// Gradients with respect to W and V given d loss / d output = G (N x k). Includes lambda.
template <class S>
void three_layer_backward(const MatrixT<S>& V, const MatrixT<S>& a, double lambda, const MatrixT<S>& X,
                          const ThreeLayerCache<S>& c, const MatrixT<S>& G, MatrixT<S>& dW, MatrixT<S>& dV) {
  MatrixT<S> d2(G.rows(), a.cols());
  d2.noalias() = G * a;
  d2.array() *= indicator_of<S>(c.Z2).array() * static_cast<S>(lambda);
  dV.resize(V.rows(), V.cols());
  dV.noalias() = d2.transpose() * c.H1;
  MatrixT<S> d1(G.rows(), V.cols());
  d1.noalias() = d2 * V;
  d1.array() *= indicator_of<S>(c.Z1).array();
  dW.resize(V.cols(), X.cols());
  dW.noalias() = d1.transpose() * X;
}

template <class S>
MatrixT<S> forward_batch(const ThreeLayerNet<S>& net, const MatrixT<S>& X, ThreeLayerCache<S>& c) {
  return three_layer_forward(net.weights_w(), net.weights_v(), net.b1, net.b2, net.a, net.lambda, X, c);
}

template <class S>
MatrixT<S> forward_batch(const ThreeLayerNet<S>& net, const MatrixT<S>& X) {
  ThreeLayerCache<S> c;
  return forward_batch(net, X, c);
}

template <class S>
VectorT<S> forward(const ThreeLayerNet<S>& net, const VectorT<S>& x) {
  const MatrixT<S> X = x.transpose();
  return forward_batch(net, X).row(0).transpose();
}

template <class S>
void backward_batch(const ThreeLayerNet<S>& net, const MatrixT<S>& X, const ThreeLayerCache<S>& c,
                    const MatrixT<S>& G, MatrixT<S>& dW, MatrixT<S>& dV) {
  three_layer_backward(net.weights_v(), net.a, net.lambda, X, c, G, dW, dV);
}

/// Single-sample gradients with respect to (Wdelta, Vdelta).
template <class S>
void backward(const ThreeLayerNet<S>& net, const VectorT<S>& x, const VectorT<S>& g, MatrixT<S>& dW,
              MatrixT<S>& dV) {
  require_input(g.size() == net.k(), "three-layer backward: gradient size mismatch");
  const MatrixT<S> X = x.transpose();
  ThreeLayerCache<S> c;
  forward_batch(net, X, c);
  const MatrixT<S> G = g.transpose();
  backward_batch(net, X, c, G, dW, dV);
}

template <class S>
SignPattern sign_pattern_at(const ThreeLayerNet<S>& net, const VectorT<S>& x, const MatrixT<S>& W,
                            const MatrixT<S>& V) {
  require_input(x.size() == net.d(), "sign_pattern: input dimension mismatch");
  require_input(W.rows() == net.m1() && W.cols() == net.d() && V.rows() == net.m2() && V.cols() == net.m1(),
                "sign_pattern: weight shape mismatch");
  const VectorT<S> z1 = W * x + net.b1;
  const VectorT<S> h1 = relu_of<S>(z1);
  const VectorT<S> z2 = V * h1 + net.b2;
  return {indicator<S>(z1).template cast<double>(), indicator<S>(z2).template cast<double>()};
}

template <class S>
SignPattern sign_pattern(const ThreeLayerNet<S>& net, const VectorT<S>& x, SignAt at) {
  if (at == SignAt::Init) return sign_pattern_at(net, x, net.w0, net.v0);
  return sign_pattern_at(net, x, net.weights_w(), net.weights_v());
}

/// Pseudo network at explicit weights: both ReLUs replaced by frozen indicators.
template <class S>
MatrixT<S> three_layer_pseudo(const MatrixT<S>& W, const MatrixT<S>& V, const VectorT<S>& b1,
                              const VectorT<S>& b2, const MatrixT<S>& a, double lambda, const MatrixT<S>& X,
                              const SignPattern& frozen, BiasMode mode) {
  require_input(frozen.dw.size() == W.rows() && frozen.dv.size() == V.rows(), "pseudo_forward: pattern size mismatch");
  MatrixT<S> Z1(X.rows(), W.rows());
  Z1.noalias() = X * W.transpose();
  if (mode != BiasMode::None) Z1.rowwise() += b1.transpose();
  const MatrixT<S> H1 = Z1.array().rowwise() * frozen.dw.template cast<S>().transpose().array();
  MatrixT<S> Z2(X.rows(), V.rows());
  Z2.noalias() = H1 * V.transpose();
  if (mode == BiasMode::Full) Z2.rowwise() += b2.transpose();
  const MatrixT<S> H2 = Z2.array().rowwise() * frozen.dv.template cast<S>().transpose().array();
  MatrixT<S> out(X.rows(), a.rows());
  out.noalias() = H2 * a.transpose();
  out *= static_cast<S>(lambda);
  return out;
}

template <class S>
VectorT<S> pseudo_forward(const ThreeLayerNet<S>& net, const VectorT<S>& x, const SignPattern& frozen,
                          BiasMode mode = BiasMode::Full) {
  const MatrixT<S> X = x.transpose();
  return three_layer_pseudo(net.weights_w(), net.weights_v(), net.b1, net.b2, net.a, net.lambda, X, frozen, mode)
      .row(0)
      .transpose();
}

}  // namespace overparam
