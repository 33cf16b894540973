#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "overparam/core/error.hpp"

namespace overparam {

template <class S>
using MatrixT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class S>
using VectorT = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Matrix = MatrixT<double>;
using Vector = VectorT<double>;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Row l_p norm: (sum_i ||W_i||_2^p)^(1/p). p = inf gives the largest row norm.
/// p = 2 is the Frobenius norm, p = 4 the norm used by the three-layer regularizer.
template <class Derived>
double row_lp_norm(const Eigen::MatrixBase<Derived>& w, double p) {
  if (!(p >= 1.0)) throw InvalidParameter("row_lp_norm: p must be >= 1");
  const auto norms = w.template cast<double>().rowwise().norm();
  if (norms.size() == 0) return 0.0;
  if (std::isinf(p)) return norms.maxCoeff();
  if (p == 2.0) return std::sqrt(norms.squaredNorm());
  // Scale by the max to avoid overflow for large p.
  const double top = norms.maxCoeff();
  if (top == 0.0) return 0.0;
  double acc = 0.0;
  for (Index i = 0; i < norms.size(); ++i) acc += std::pow(norms(i) / top, p);
  return top * std::pow(acc, 1.0 / p);
}

/// ||W||_{2,4}^4 = sum_i ||W_i||_2^4, computed without the root.
template <class Derived>
double row_l4_pow4(const Eigen::MatrixBase<Derived>& w) {
  const auto sq = w.template cast<double>().rowwise().squaredNorm();
  return sq.squaredNorm();
}

template <class S>
constexpr S relu(S x) noexcept {
  return x > S(0) ? x : S(0);
}

/// Subgradient convention: 1 at exactly zero.
template <class S>
constexpr S relu_grad(S x) noexcept {
  return x >= S(0) ? S(1) : S(0);
}

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace overparam
