#pragma once

#include <functional>
#include <string>

#include "overparam/nets/three_layer.hpp"
#include "overparam/nets/two_layer.hpp"

namespace overparam {

enum class FeatureKind { Ntk, Conjugate };

/// Fixed map x -> phi(x) extracted from a frozen network.
struct FeatureMap {
  FeatureKind kind = FeatureKind::Conjugate;
  Index dim = 0;
  std::function<Vector(const Vector&)> extractor;

  Vector operator()(const Vector& x) const { return extractor(x); }
};

/// Gradient of every output with respect to W at the initial weights, one block of
/// m*d entries per output (row-major in W).
inline Vector ntk_feature_map(const TwoLayerNet<double>& net, const Vector& x) {
  const Vector dw = indicator<double>(net.w0 * x + net.b);
  const Index block = net.m() * net.d();
  Vector out(net.k() * block);
  for (Index r = 0; r < net.k(); ++r) {
    Matrix g = (net.a.row(r).transpose().cwiseProduct(dw)) * x.transpose();
    out.segment(r * block, block) = Eigen::Map<const Vector>(g.data(), block);
  }
  return out;
}

/// Per output: gradient with respect to W (m1*d entries) then V (m2*m1 entries) at init.
inline Vector ntk_feature_map(const ThreeLayerNet<double>& net, const Vector& x) {
  const Vector z1 = net.w0 * x + net.b1;
  const Vector h1 = relu_of<double>(z1);
  const Vector d1 = indicator<double>(z1);
  const Vector d2 = indicator<double>(net.v0 * h1 + net.b2);
  const Index bw = net.m1() * net.d(), bv = net.m2() * net.m1();
  Vector out(net.k() * (bw + bv));
  for (Index r = 0; r < net.k(); ++r) {
    const Vector delta2 = net.lambda * net.a.row(r).transpose().cwiseProduct(d2);
    const Vector delta1 = (net.v0.transpose() * delta2).cwiseProduct(d1);
    Matrix gw = delta1 * x.transpose();
    Matrix gv = delta2 * h1.transpose();
    const Index off = r * (bw + bv);
    out.segment(off, bw) = Eigen::Map<const Vector>(gw.data(), bw);
    out.segment(off + bw, bv) = Eigen::Map<const Vector>(gv.data(), bv);
  }
  return out;
}

/// Hidden activations at init (the top hidden layer for three-layer nets).
inline Vector conjugate_feature_map(const TwoLayerNet<double>& net, const Vector& x) {
  return relu_of<double>(net.w0 * x + net.b);
}

inline Vector conjugate_feature_map(const ThreeLayerNet<double>& net, const Vector& x) {
  const Vector h1 = relu_of<double>(net.w0 * x + net.b1);
  return relu_of<double>(net.v0 * h1 + net.b2);
}

template <class Net>
FeatureMap make_feature_map(const Net& net, FeatureKind kind) {
  FeatureMap fm;
  fm.kind = kind;
  if (kind == FeatureKind::Ntk) {
    fm.extractor = [net](const Vector& x) { return ntk_feature_map(net, x); };
  } else {
    fm.extractor = [net](const Vector& x) { return conjugate_feature_map(net, x); };
  }
  fm.dim = fm.extractor(Vector::Zero(net.d()).eval()).size();
  return fm;
}

}  // namespace overparam
