#pragma once

#include <cmath>
#include <string>

#include "overparam/core/error.hpp"
#include "overparam/core/numerics.hpp"

namespace overparam {

/// Huber: 1/2 r^2 for r = ||p - y|| <= 1, r - 1/2 beyond. Convex, 1-Lipschitz, 1-smooth.
/// Squared: mean over outputs of (p - y)^2. Matches the usual MSE but is not 1-Lipschitz.
/// Logistic: mean over outputs of log(1 + exp(-y p)) for labels in {-1, +1}.
enum class LossKind { Huber, Squared, Logistic };

inline LossKind loss_from_string(const std::string& s) {
  if (s == "huber" || s == "l2-regression") return LossKind::Huber;
  if (s == "squared" || s == "mse") return LossKind::Squared;
  if (s == "logistic") return LossKind::Logistic;
  throw InvalidParameter("unknown loss: " + s);
}

inline const char* to_string(LossKind k) {
  switch (k) {
    case LossKind::Huber: return "huber";
    case LossKind::Squared: return "squared";
    case LossKind::Logistic: return "logistic";
  }
  return "?";
}

struct LossFn {
  LossKind kind = LossKind::Huber;

  /// False for the plain squared loss, which is kept only for parity with common MSE training.
  bool satisfies_contract() const { return kind != LossKind::Squared; }

  template <class DP, class DY>
  double eval(const Eigen::MatrixBase<DP>& p, const Eigen::MatrixBase<DY>& y) const {
    const auto pd = p.template cast<double>();
    const auto yd = y.template cast<double>();
    switch (kind) {
      case LossKind::Huber: {
        const double r = (pd - yd).norm();
        return r <= 1.0 ? 0.5 * r * r : r - 0.5;
      }
      case LossKind::Squared:
        return (pd - yd).squaredNorm() / static_cast<double>(p.size());
      case LossKind::Logistic: {
        double acc = 0.0;
        for (Index i = 0; i < p.size(); ++i) acc += softplus(-yd(i) * pd(i));
        return acc / static_cast<double>(p.size());
      }
    }
    return 0.0;
  }

  /// d loss / d p, written into g (same size as p).
  template <class DP, class DY, class DG>
  void grad(const Eigen::MatrixBase<DP>& p, const Eigen::MatrixBase<DY>& y, Eigen::MatrixBase<DG>& g) const {
    using S = typename DG::Scalar;
    switch (kind) {
      case LossKind::Huber: {
        const double r = (p.template cast<double>() - y.template cast<double>()).norm();
        const double scale = r <= 1.0 ? 1.0 : 1.0 / r;
        g = ((p - y).template cast<double>() * scale).template cast<S>();
        return;
      }
      case LossKind::Squared:
        g = ((p - y).template cast<double>() * (2.0 / static_cast<double>(p.size()))).template cast<S>();
        return;
      case LossKind::Logistic:
        for (Index i = 0; i < p.size(); ++i) {
          const double yi = static_cast<double>(y(i)), pi = static_cast<double>(p(i));
          g(i) = static_cast<S>(-yi * sigmoid(-yi * pi) / static_cast<double>(p.size()));
        }
        return;
    }
  }

  /// Sum of per-row losses; G receives per-row gradients scaled by `scale` (1/B for a batch mean).
  template <class S>
  double batch(const MatrixT<S>& P, const MatrixT<S>& Y, MatrixT<S>* G, double scale) const {
    require_input(P.rows() == Y.rows() && P.cols() == Y.cols(), "loss: prediction/label shape mismatch");
    double total = 0.0;
    if (G) G->resize(P.rows(), P.cols());
    VectorT<S> g(P.cols());
    for (Index n = 0; n < P.rows(); ++n) {
      total += eval(P.row(n).transpose(), Y.row(n).transpose());
      if (G) {
        grad(P.row(n).transpose(), Y.row(n).transpose(), g);
        G->row(n) = (g * static_cast<S>(scale)).transpose();
      }
    }
    return total;
  }

  static double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }
  static double sigmoid(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
  }
};

}  // namespace overparam
