#pragma once

#include <cmath>
#include <functional>

#include "overparam/core/rng.hpp"
#include "overparam/core/stats.hpp"
#include "overparam/train/objectives.hpp"

namespace overparam {

/// Objective over a flat parameter vector. Randomised objectives draw their noise from `noise`;
/// deterministic ones ignore it.
using ProbeObjective = std::function<double(const Vector& params, RngStream& noise)>;

struct CurvatureProbe {
  Vector direction;
  double eta = 0;
  double estimate = 0;
  double std_err = 0;
  int samples = 0;
};

/// Mean over samples of [f(x + sqrt(eta) u) + f(x - sqrt(eta) u) - 2 f(x)] / eta, an estimate of
/// u^T (Hessian of E f) u. The three evaluations of one sample share a copy of the same noise stream.
inline CurvatureProbe curvature_probe(const ProbeObjective& f, const Vector& x, const Vector& direction, double eta,
                                      int samples, const RngStream& rng) {
  if (!(eta > 0.0)) throw InvalidParameter("curvature_probe: eta must be positive");
  if (samples < 1) throw InvalidParameter("curvature_probe: samples must be >= 1");
  require_input(direction.size() == x.size(), "curvature_probe: direction size mismatch");
  require_input(std::abs(direction.norm() - 1.0) <= 1e-9, "curvature_probe: direction must be unit norm");
  const double h = std::sqrt(eta);
  const Vector up = x + h * direction, dn = x - h * direction;
  MeanAccumulator acc;
  for (int s = 0; s < samples; ++s) {
    const RngStream base = rng.split(static_cast<std::uint64_t>(s));
    RngStream r1 = base, r2 = base, r3 = base;
    const double fu = f(up, r1), fd = f(dn, r2), f0 = f(x, r3);
    acc.add((fu + fd - 2 * f0) / eta);
  }
  CurvatureProbe p;
  p.direction = direction;
  p.eta = eta;
  p.estimate = acc.mean;
  p.std_err = samples > 1 ? acc.std_err() : 0.0;
  p.samples = samples;
  return p;
}

/// Flat (Wdelta, Vdelta) layout, row-major, W first.
inline Vector flatten_deltas(const ThreeLayerNet<double>& net) {
  Vector v(net.w_delta.size() + net.v_delta.size());
  v.head(net.w_delta.size()) = Eigen::Map<const Vector>(net.w_delta.data(), net.w_delta.size());
  v.tail(net.v_delta.size()) = Eigen::Map<const Vector>(net.v_delta.data(), net.v_delta.size());
  return v;
}

inline void unflatten_deltas(ThreeLayerNet<double>& net, const Vector& v) {
  require_input(v.size() == net.w_delta.size() + net.v_delta.size(), "unflatten_deltas: size mismatch");
  Eigen::Map<Vector>(net.w_delta.data(), net.w_delta.size()) = v.head(net.w_delta.size());
  Eigen::Map<Vector>(net.v_delta.data(), net.v_delta.size()) = v.tail(net.v_delta.size());
}

/// Smoothed empirical objective over (Wdelta, Vdelta): fresh smoothing noise per call.
inline ProbeObjective smoothed_objective(ThreeLayerNet<double> net, Matrix X, Matrix Y, LossFn loss, RegParams reg,
                                         SmoothingParams sm) {
  return [net = std::move(net), X = std::move(X), Y = std::move(Y), loss, reg, sm](const Vector& p,
                                                                                  RngStream& noise) mutable {
    unflatten_deltas(net, p);
    const auto nd = draw_smoothing(net, sm, noise);
    return objective_value_and_grad(net, X, Y, loss, reg, nd);
  };
}

}  // namespace overparam
