#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "overparam/core/error.hpp"
#include "overparam/core/numerics.hpp"
#include "overparam/targets/activation.hpp"

namespace overparam {

/// Maps a unit input to k outputs.
using TargetEvaluator = std::function<Vector(const Vector&)>;

/// f*_r(x) = sum_i a*_{r,i} phi_i(<w1_i, x>) <w2_i, x>
struct TwoLayerTarget {
  Matrix w1;     // p x d, unit rows
  Matrix w2;     // p x d, unit rows
  Matrix astar;  // k x p, entries in [-1, 1]
  std::vector<SmoothActivation> phis;

  Index p() const { return w1.rows(); }
  Index d() const { return w1.cols(); }
  Index k() const { return astar.rows(); }

  void validate(double tol = 1e-9) const {
    require_input(w2.rows() == p() && w2.cols() == d(), "TwoLayerTarget: w2 shape");
    require_input(astar.cols() == p(), "TwoLayerTarget: a* shape");
    require_input(static_cast<Index>(phis.size()) == p(), "TwoLayerTarget: one activation per term");
    for (Index i = 0; i < p(); ++i) {
      require_input(std::abs(w1.row(i).norm() - 1.0) <= tol, "TwoLayerTarget: w1 rows must be unit");
      require_input(std::abs(w2.row(i).norm() - 1.0) <= tol, "TwoLayerTarget: w2 rows must be unit");
    }
    require_input(astar.size() == 0 || astar.cwiseAbs().maxCoeff() <= 1.0, "TwoLayerTarget: |a*| <= 1");
  }
};

/// f*_r(x) = sum_i a*_{r,i} Phi_i(sum_j v1_{i,j} phi1_j(<w1_j,x>)) * (sum_j v2_{i,j} phi2_j(<w2_j,x>))
struct ThreeLayerTarget {
  Matrix w1;     // p2 x d
  Matrix w2;     // p2 x d
  Matrix v1;     // p1 x p2
  Matrix v2;     // p1 x p2
  Matrix astar;  // k x p1
  std::vector<SmoothActivation> phi1, phi2;  // p2 each
  std::vector<SmoothActivation> Phi;         // p1

  Index p1() const { return v1.rows(); }
  Index p2() const { return w1.rows(); }
  Index d() const { return w1.cols(); }
  Index k() const { return astar.rows(); }

  void validate(double tol = 1e-9) const {
    require_input(w2.rows() == p2() && w2.cols() == d(), "ThreeLayerTarget: w2 shape");
    require_input(v1.cols() == p2() && v2.rows() == p1() && v2.cols() == p2(), "ThreeLayerTarget: v shape");
    require_input(astar.cols() == p1(), "ThreeLayerTarget: a* shape");
    require_input(static_cast<Index>(phi1.size()) == p2() && static_cast<Index>(phi2.size()) == p2() &&
                      static_cast<Index>(Phi.size()) == p1(),
                  "ThreeLayerTarget: activation counts");
    auto unit = [tol](const Matrix& m) {
      for (Index i = 0; i < m.rows(); ++i)
        if (std::abs(m.row(i).norm() - 1.0) > tol) return false;
      return true;
    };
    require_input(unit(w1) && unit(w2) && unit(v1) && unit(v2), "ThreeLayerTarget: weights must be unit");
    require_input(astar.size() == 0 || astar.cwiseAbs().maxCoeff() <= 1.0, "ThreeLayerTarget: |a*| <= 1");
  }
};

inline Vector eval_two_layer_target(const TwoLayerTarget& t, const Vector& x) {
  require_input(x.size() == t.d(), "eval_two_layer_target: input dimension mismatch");
  Vector out = Vector::Zero(t.k());
  for (Index i = 0; i < t.p(); ++i) {
    const double term = t.phis[static_cast<std::size_t>(i)](t.w1.row(i).dot(x)) * t.w2.row(i).dot(x);
    out += t.astar.col(i) * term;
  }
  return out;
}

inline Vector eval_three_layer_target(const ThreeLayerTarget& t, const Vector& x) {
  require_input(x.size() == t.d(), "eval_three_layer_target: input dimension mismatch");
  Vector h1(t.p2()), h2(t.p2());
  for (Index j = 0; j < t.p2(); ++j) {
    h1(j) = t.phi1[static_cast<std::size_t>(j)](t.w1.row(j).dot(x));
    h2(j) = t.phi2[static_cast<std::size_t>(j)](t.w2.row(j).dot(x));
  }
  Vector out = Vector::Zero(t.k());
  for (Index i = 0; i < t.p1(); ++i) {
    const double term = t.Phi[static_cast<std::size_t>(i)](t.v1.row(i).dot(h1)) * t.v2.row(i).dot(h2);
    out += t.astar.col(i) * term;
  }
  return out;
}

inline TargetEvaluator as_evaluator(TwoLayerTarget t) {
  t.validate();
  return [t = std::move(t)](const Vector& x) { return eval_two_layer_target(t, x); };
}

inline TargetEvaluator as_evaluator(ThreeLayerTarget t) {
  t.validate();
  return [t = std::move(t)](const Vector& x) { return eval_three_layer_target(t, x); };
}

/// Synthetic regression targets on R^4.
///   sin-fig1:  (sin 3x1 + sin 3x2 + sin 3x3 - 2)^2 cos 7x4
///   tanh-fig6: (tanh 8x1 + tanh 8x2 + tanh 8x3 - 2)^2 tanh 8x4
inline TargetEvaluator builtin_experiment_target(const std::string& name) {
  if (name == "sin-fig1") {
    return [](const Vector& x) {
      require_input(x.size() == 4, "sin-fig1 expects d = 4");
      const double s = std::sin(3 * x(0)) + std::sin(3 * x(1)) + std::sin(3 * x(2)) - 2.0;
      return Vector::Constant(1, s * s * std::cos(7 * x(3)));
    };
  }
  if (name == "tanh-fig6") {
    return [](const Vector& x) {
      require_input(x.size() == 4, "tanh-fig6 expects d = 4");
      const double s = std::tanh(8 * x(0)) + std::tanh(8 * x(1)) + std::tanh(8 * x(2)) - 2.0;
      return Vector::Constant(1, s * s * std::tanh(8 * x(3)));
    };
  }
  throw InvalidParameter("unknown experiment target: " + name);
}

}  // namespace overparam
