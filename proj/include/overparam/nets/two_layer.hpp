#pragma once

#include <cstdint>

#include "overparam/core/error.hpp"
#include "overparam/core/numerics.hpp"
#include "overparam/core/rng.hpp"
#include "overparam/nets/common.hpp"

namespace overparam {

/// f_r(x) = sum_i a_{r,i} relu(<w0_i + wdelta_i, x> + b_i). Only wdelta trains.
template <class S = double>
struct TwoLayerNet {
  using Scalar = S;

  MatrixT<S> w0;       // m x d
  MatrixT<S> w_delta;  // m x d
  VectorT<S> b;        // m
  MatrixT<S> a;        // k x m
  double eps_a = 1.0;
  InitProfile profile = InitProfile::Experiment;
  std::uint64_t seed = 0;

  Index m() const { return w0.rows(); }
  Index d() const { return w0.cols(); }
  Index k() const { return a.rows(); }

  MatrixT<S> weights() const { return w0 + w_delta; }
};

/// W0, b ~ N(0, 1/m); a ~ N(0, eps_a^2) (theory) or N(0, 1) (experiment). Draw order: W0, b, a.
template <class S = double>
TwoLayerNet<S> init_two_layer(Index m, Index d, Index k, double eps_a, InitProfile profile, RngStream& rng) {
  if (m < 1 || d < 1 || k < 1) throw InvalidParameter("init_two_layer: dimensions must be >= 1");
  if (!(eps_a > 0.0 && eps_a <= 1.0)) throw InvalidParameter("init_two_layer: eps_a must be in (0, 1]");
  TwoLayerNet<S> net;
  net.eps_a = eps_a;
  net.profile = profile;
  net.seed = rng.seed();
  const double var = 1.0 / static_cast<double>(m);
  net.w0 = sample_gaussian_matrix<S>(m, d, var, rng);
  net.b = sample_gaussian_vector<S>(m, var, rng);
  const double avar = profile == InitProfile::Theory ? eps_a * eps_a : 1.0;
  net.a = sample_gaussian_matrix<S>(k, m, avar, rng);
  net.w_delta = MatrixT<S>::Zero(m, d);
  return net;
}

namespace detail {
template <class S>
void check_input(const TwoLayerNet<S>& net, Index dim) {
  require_input(dim == net.d(), "two-layer net: input dimension mismatch");
}
}  // namespace detail

template <class S>
VectorT<S> preactivation(const TwoLayerNet<S>& net, const VectorT<S>& x) {
  detail::check_input(net, x.size());
  return net.weights() * x + net.b;
}

template <class S>
VectorT<S> forward(const TwoLayerNet<S>& net, const VectorT<S>& x) {
  const VectorT<S> h = relu_of<S>(preactivation(net, x));
  return net.a * h;
}

/// Pre-activations for a batch: Z = X W^T + 1 b^T (N x m).
template <class S>
MatrixT<S> preactivation_batch(const TwoLayerNet<S>& net, const MatrixT<S>& X) {
  detail::check_input(net, X.cols());
  MatrixT<S> Z(X.rows(), net.m());
  Z.noalias() = X * net.weights().transpose();
  Z.rowwise() += net.b.transpose();
  return Z;
}

template <class S>
MatrixT<S> forward_batch(const TwoLayerNet<S>& net, const MatrixT<S>& X) {
  const MatrixT<S> H = relu_of<S>(preactivation_batch(net, X));
  return H * net.a.transpose();
}

/// Gradient with respect to wdelta for d loss / d output = g.
template <class S>
MatrixT<S> backward(const TwoLayerNet<S>& net, const VectorT<S>& x, const VectorT<S>& g) {
  require_input(g.size() == net.k(), "two-layer backward: gradient size mismatch");
  const VectorT<S> z = preactivation(net, x);
  const VectorT<S> delta = (net.a.transpose() * g).cwiseProduct(indicator<S>(z));
  return delta * x.transpose();
}

/// Batched gradient; Z are the cached pre-activations and G is N x k.
template <class S>
MatrixT<S> backward_batch(const TwoLayerNet<S>& net, const MatrixT<S>& X, const MatrixT<S>& Z,
                          const MatrixT<S>& G) {
  MatrixT<S> delta = G * net.a;
  delta.array() *= indicator_of<S>(Z).array();
  MatrixT<S> dW(net.m(), net.d());
  dW.noalias() = delta.transpose() * X;
  return dW;
}

/// Activation indicators at the given first-layer weights.
template <class S>
SignPattern sign_pattern_at(const TwoLayerNet<S>& net, const VectorT<S>& x, const MatrixT<S>& W) {
  detail::check_input(net, x.size());
  require_input(W.rows() == net.m() && W.cols() == net.d(), "sign_pattern: weight shape mismatch");
  const VectorT<S> z = W * x + net.b;
  return {indicator<S>(z).template cast<double>(), Vector()};
}

template <class S>
SignPattern sign_pattern(const TwoLayerNet<S>& net, const VectorT<S>& x, SignAt at) {
  return sign_pattern_at(net, x, at == SignAt::Init ? net.w0 : net.weights());
}

/// Network with every ReLU replaced by the frozen indicator.
template <class S>
VectorT<S> pseudo_forward(const TwoLayerNet<S>& net, const VectorT<S>& x, const SignPattern& frozen,
                          BiasMode mode = BiasMode::Full) {
  require_input(frozen.dw.size() == net.m(), "pseudo_forward: pattern size mismatch");
  VectorT<S> z = net.weights() * x;
  if (mode == BiasMode::Full) z += net.b;
  const VectorT<S> h = frozen.dw.template cast<S>().cwiseProduct(z);
  return net.a * h;
}

/// Part of the pseudo network that is linear in the increment: sum_i a_{r,i} D_i <wdelta_i, x>.
template <class S>
VectorT<S> pseudo_increment(const TwoLayerNet<S>& net, const VectorT<S>& x, const SignPattern& frozen,
                            const MatrixT<S>& w_delta) {
  require_input(frozen.dw.size() == net.m() && w_delta.rows() == net.m() && w_delta.cols() == net.d(),
                "pseudo_increment: shape mismatch");
  const VectorT<S> h = frozen.dw.template cast<S>().cwiseProduct(w_delta * x);
  return net.a * h;
}

}  // namespace overparam
