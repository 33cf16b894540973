#pragma once

#include <functional>
#include <type_traits>
#include <utility>
#include <vector>

#include "overparam/nets/features.hpp"
#include "overparam/nets/three_layer.hpp"
#include "overparam/nets/two_layer.hpp"

namespace overparam {

// Trainable adapters used by the minibatch trainer. Each model exposes
//   params()                 matrices updated by SGD
//   forward(X)               predictions, caching what backward needs
//   backward(X, G, grads)    gradients for the last forward
//   predict(X)               predictions without touching the cache
//   decay_targets()          matrices that weight decay pulls toward zero, one per param
// and optionally first_layer() for the row-l4 regularizer.

/// Two-layer net; trains W' with decay on the full first layer W0 + W'.
template <class S>
class TwoLayerModel {
 public:
  using Scalar = S;
  explicit TwoLayerModel(TwoLayerNet<S>& net) : net_(net) {}

  std::vector<MatrixT<S>*> params() { return {&net_.w_delta}; }

  MatrixT<S> forward(const MatrixT<S>& X) {
    w_ = net_.weights();
    z_.resize(X.rows(), net_.m());
    z_.noalias() = X * w_.transpose();
    z_.rowwise() += net_.b.transpose();
    return relu_of<S>(z_) * net_.a.transpose();
  }

  void backward(const MatrixT<S>& X, const MatrixT<S>& G, std::vector<MatrixT<S>>& grads) {
    grads.resize(1);
    grads[0] = backward_batch(net_, X, z_, G);
  }

  MatrixT<S> predict(const MatrixT<S>& X) const { return forward_batch(net_, X); }

  std::vector<const MatrixT<S>*> decay_targets() const { return {&w_}; }
  const MatrixT<S>& first_layer() const { return w_; }

  TwoLayerNet<S>& net() { return net_; }

 private:
  TwoLayerNet<S>& net_;
  MatrixT<S> w_, z_;
};

/// Three-layer net; trains (W', V') with decay on the full weights.
template <class S>
class ThreeLayerModel {
 public:
  using Scalar = S;
  explicit ThreeLayerModel(ThreeLayerNet<S>& net) : net_(net) {}

  std::vector<MatrixT<S>*> params() { return {&net_.w_delta, &net_.v_delta}; }

  MatrixT<S> forward(const MatrixT<S>& X) {
    w_ = net_.weights_w();
    v_ = net_.weights_v();
    return three_layer_forward(w_, v_, net_.b1, net_.b2, net_.a, net_.lambda, X, cache_);
  }

  void backward(const MatrixT<S>& X, const MatrixT<S>& G, std::vector<MatrixT<S>>& grads) {
    grads.resize(2);
    three_layer_backward(v_, net_.a, net_.lambda, X, cache_, G, grads[0], grads[1]);
  }

  MatrixT<S> predict(const MatrixT<S>& X) const { return forward_batch(net_, X); }

  std::vector<const MatrixT<S>*> decay_targets() const { return {&w_, &v_}; }
  const MatrixT<S>& first_layer() const { return w_; }

  ThreeLayerNet<S>& net() { return net_; }

 private:
  ThreeLayerNet<S>& net_;
  MatrixT<S> w_, v_;
  ThreeLayerCache<S> cache_;
};

/// Conjugate-kernel baseline: a fresh output layer on frozen top-hidden activations.
/// The output weights start at zero.
template <class S, class Net>
class LastLayerModel {
 public:
  using Scalar = S;
  explicit LastLayerModel(const Net& net) : net_(net), A_(MatrixT<S>::Zero(net.k(), top_width(net))) {}

  std::vector<MatrixT<S>*> params() { return {&A_}; }

  MatrixT<S> forward(const MatrixT<S>& X) {
    h_ = features(X);
    return h_ * A_.transpose();
  }

  void backward(const MatrixT<S>&, const MatrixT<S>& G, std::vector<MatrixT<S>>& grads) {
    grads.resize(1);
    grads[0].noalias() = G.transpose() * h_;
  }

  MatrixT<S> predict(const MatrixT<S>& X) const { return features(X) * A_.transpose(); }

  std::vector<const MatrixT<S>*> decay_targets() const { return {&A_}; }

  const MatrixT<S>& readout() const { return A_; }

  MatrixT<S> features(const MatrixT<S>& X) const {
    if constexpr (std::is_same_v<Net, TwoLayerNet<S>>) {
      MatrixT<S> z(X.rows(), net_.m());
      z.noalias() = X * net_.w0.transpose();
      z.rowwise() += net_.b.transpose();
      return relu_of<S>(z);
    } else {
      ThreeLayerCache<S> c;
      three_layer_forward(net_.w0, net_.v0, net_.b1, net_.b2, net_.a, net_.lambda, X, c);
      return c.H2;
    }
  }

 private:
  static Index top_width(const Net& net) {
    if constexpr (std::is_same_v<Net, TwoLayerNet<S>>) {
      return net.m();
    } else {
      return net.m2();
    }
  }

  const Net& net_;
  MatrixT<S> A_;
  MatrixT<S> h_;
};

/// Linearized two-layer net: f(W0) + <grad f(W0), W'>, trained over W'.
template <class S>
class TwoLayerNtkModel {
 public:
  using Scalar = S;
  explicit TwoLayerNtkModel(const TwoLayerNet<S>& net) : net_(net), dW_(MatrixT<S>::Zero(net.m(), net.d())) {}

  std::vector<MatrixT<S>*> params() { return {&dW_}; }

  MatrixT<S> forward(const MatrixT<S>& X) { return eval(X, &d_); }

  void backward(const MatrixT<S>& X, const MatrixT<S>& G, std::vector<MatrixT<S>>& grads) {
    MatrixT<S> delta = G * net_.a;
    delta.array() *= d_.array();
    grads.resize(1);
    grads[0].noalias() = delta.transpose() * X;
  }

  MatrixT<S> predict(const MatrixT<S>& X) const { return eval(X, nullptr); }

  std::vector<const MatrixT<S>*> decay_targets() const { return {&dW_}; }

 private:
  MatrixT<S> eval(const MatrixT<S>& X, MatrixT<S>* dcache) const {
    MatrixT<S> z(X.rows(), net_.m());
    z.noalias() = X * net_.w0.transpose();
    z.rowwise() += net_.b.transpose();
    MatrixT<S> d = indicator_of<S>(z);
    MatrixT<S> lin(X.rows(), net_.m());
    lin.noalias() = X * dW_.transpose();
    MatrixT<S> h = relu_of<S>(z) + MatrixT<S>(d.cwiseProduct(lin));
    MatrixT<S> out = h * net_.a.transpose();
    if (dcache) *dcache = std::move(d);
    return out;
  }

  const TwoLayerNet<S>& net_;
  MatrixT<S> dW_;
  MatrixT<S> d_;
};

/// Linearized three-layer net over (W', V'):
///   f0(x) + lambda a D2 (V' h1 + V0 D1 W' x)
template <class S>
class ThreeLayerNtkModel {
 public:
  using Scalar = S;
  explicit ThreeLayerNtkModel(const ThreeLayerNet<S>& net)
      : net_(net), dW_(MatrixT<S>::Zero(net.m1(), net.d())), dV_(MatrixT<S>::Zero(net.m2(), net.m1())) {}

  std::vector<MatrixT<S>*> params() { return {&dW_, &dV_}; }

  MatrixT<S> forward(const MatrixT<S>& X) { return eval(X, cache_); }

  void backward(const MatrixT<S>& X, const MatrixT<S>& G, std::vector<MatrixT<S>>& grads) {
    grads.resize(2);
    three_layer_backward(net_.v0, net_.a, net_.lambda, X, cache_, G, grads[0], grads[1]);
  }

  MatrixT<S> predict(const MatrixT<S>& X) const {
    ThreeLayerCache<S> c;
    return eval(X, c);
  }

  std::vector<const MatrixT<S>*> decay_targets() const { return {&dW_, &dV_}; }

 private:
  // Gradient of the linear model equals the network gradient at init, so the
  // cache holds the init activations and three_layer_backward is reused as is.
  MatrixT<S> eval(const MatrixT<S>& X, ThreeLayerCache<S>& c) const {
    MatrixT<S> out = three_layer_forward(net_.w0, net_.v0, net_.b1, net_.b2, net_.a, net_.lambda, X, c);
    MatrixT<S> t1(X.rows(), net_.m1());
    t1.noalias() = X * dW_.transpose();
    t1.array() *= indicator_of<S>(c.Z1).array();
    MatrixT<S> t(X.rows(), net_.m2());
    t.noalias() = t1 * net_.v0.transpose();
    t.noalias() += c.H1 * dV_.transpose();
    t.array() *= indicator_of<S>(c.Z2).array();
    out.noalias() += static_cast<S>(net_.lambda) * (t * net_.a.transpose());
    return out;
  }

  const ThreeLayerNet<S>& net_;
  MatrixT<S> dW_, dV_;
  ThreeLayerCache<S> cache_;
};

/// Linear model on an explicit feature map (double precision, small problems).
/// Conjugate features: one weight row per output. NTK features: one shared weight
/// vector whose inner product with output r's feature block gives output r.
/// An optional offset (the network output at init, for the linearized model) is added.
class LinearFeatureModel {
 public:
  using Scalar = double;
  using Offset = std::function<Vector(const Vector&)>;

  LinearFeatureModel(FeatureMap fm, Index k, Offset offset = {})
      : fm_(std::move(fm)), k_(k), offset_(std::move(offset)) {
    if (fm_.kind == FeatureKind::Ntk) {
      require_input(fm_.dim % k == 0, "LinearFeatureModel: NTK feature size not divisible by outputs");
      theta_ = Matrix::Zero(1, fm_.dim / k);
    } else {
      theta_ = Matrix::Zero(k, fm_.dim);
    }
  }

  std::vector<Matrix*> params() { return {&theta_}; }

  Matrix forward(const Matrix& X) {
    phi_ = features(X);
    return apply(phi_, X);
  }

  void backward(const Matrix&, const Matrix& G, std::vector<Matrix>& grads) {
    grads.resize(1);
    if (fm_.kind == FeatureKind::Ntk) {
      const Index P = theta_.cols();
      grads[0] = Matrix::Zero(1, P);
      for (Index r = 0; r < k_; ++r) grads[0] += G.col(r).transpose() * phi_.middleCols(r * P, P);
    } else {
      grads[0] = G.transpose() * phi_;
    }
  }

  Matrix predict(const Matrix& X) const { return apply(features(X), X); }

  std::vector<const Matrix*> decay_targets() const { return {&theta_}; }

  const Matrix& weights() const { return theta_; }

 private:
  Matrix features(const Matrix& X) const {
    Matrix phi(X.rows(), fm_.dim);
    for (Index n = 0; n < X.rows(); ++n) phi.row(n) = fm_(X.row(n).transpose()).transpose();
    return phi;
  }

  Matrix apply(const Matrix& phi, const Matrix& X) const {
    Matrix out(phi.rows(), k_);
    if (fm_.kind == FeatureKind::Ntk) {
      const Index P = theta_.cols();
      for (Index r = 0; r < k_; ++r) out.col(r) = phi.middleCols(r * P, P) * theta_.row(0).transpose();
    } else {
      out = phi * theta_.transpose();
    }
    if (offset_)
      for (Index n = 0; n < X.rows(); ++n) out.row(n) += offset_(X.row(n).transpose()).transpose();
    return out;
  }

  FeatureMap fm_;
  Index k_;
  Offset offset_;
  Matrix theta_;
  Matrix phi_;
};

}  // namespace overparam
