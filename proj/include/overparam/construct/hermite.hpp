#pragma once

#include <cmath>
#include <vector>

#include "overparam/core/error.hpp"

namespace overparam {

/// Probabilists' Hermite polynomials h_0..h_D.
/// h_0 = 1, h_1 = x, h_{i+1} = x h_i - i h_{i-1}; E[h_i(g) h_j(g)] = i! delta_ij for g ~ N(0,1).
class HermiteBasis {
 public:
  explicit HermiteBasis(int max_degree) : D_(max_degree) {
    if (max_degree < 0) throw InvalidParameter("HermiteBasis: max degree must be >= 0");
    coef_.assign(D_ + 1, {});
    coef_[0] = {1.0};
    if (D_ >= 1) coef_[1] = {0.0, 1.0};
    for (int i = 1; i < D_; ++i) {
      std::vector<double> next(i + 2, 0.0);
      for (int j = 0; j <= i; ++j) next[j + 1] += coef_[i][j];
      for (int j = 0; j < i; ++j) next[j] -= i * coef_[i - 1][j];
      coef_[i + 1] = std::move(next);
    }
  }

  int max_degree() const { return D_; }

  /// Monomial coefficients of h_i, lowest degree first.
  const std::vector<double>& coefficients(int i) const {
    check(i);
    return coef_[i];
  }

  double eval(int i, double x) const {
    check(i);
    if (i == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int j = 1; j < i; ++j) {
      const double next = x * cur - j * prev;
      prev = cur;
      cur = next;
    }
    return cur;
  }

  /// h_0(x)..h_n(x) into out (resized to n + 1).
  void eval_all(int n, double x, std::vector<double>& out) const {
    check(n);
    out.resize(n + 1);
    out[0] = 1.0;
    if (n >= 1) out[1] = x;
    for (int j = 1; j < n; ++j) out[j + 1] = x * out[j] - j * out[j - 1];
  }

  /// E[h_i(g)^2] = i!
  static double norm_sq(int i) { return std::tgamma(i + 1.0); }

 private:
  void check(int i) const {
    if (i < 0 || i > D_) throw InvalidParameter("hermite: degree outside [0, D]");
  }

  int D_;
  std::vector<std::vector<double>> coef_;
};

inline double hermite_eval(const HermiteBasis& basis, int i, double x) { return basis.eval(i, x); }

}  // namespace overparam
