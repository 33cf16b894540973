#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "overparam/core/error.hpp"

namespace overparam {

/// phi(z) = sum_i c_i z^i with a closed-form evaluator alongside the truncated series.
struct SmoothActivation {
  std::string name;
  std::function<double(double)> evaluator;
  std::vector<double> taylor;  // c_0 .. c_D

  double operator()(double z) const { return evaluator(z); }

  int degree() const { return static_cast<int>(taylor.size()) - 1; }

  double series(double z) const {
    double acc = 0.0;
    for (auto it = taylor.rbegin(); it != taylor.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  /// max |evaluator - series| on an n-point uniform grid of [-1, 1].
  double series_error(int n = 2001) const {
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      const double z = -1.0 + 2.0 * j / (n - 1);
      worst = std::max(worst, std::abs(evaluator(z) - series(z)));
    }
    return worst;
  }
};

namespace activations {

inline constexpr int kDefaultDegree = 30;
inline constexpr double kTailTolerance = 1e-12;

namespace detail {
// Fill coefficients up to min_degree, then keep going until two consecutive
// coefficients are below 1e-14. For the entire functions in the catalogue the
// coefficients decay factorially, so the tail on [-1,1] is then far below 1e-12.
template <class Coef>
std::vector<double> entire_series(Coef&& coef, int min_degree) {
  std::vector<double> c;
  for (int i = 0; i <= min_degree; ++i) c.push_back(coef(i));
  for (int i = min_degree + 1; i < 400; ++i) {
    const double a = std::abs(coef(i)), b = std::abs(coef(i + 1));
    if (a + b < kTailTolerance * 1e-2 && i > 2) break;
    c.push_back(coef(i));
  }
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  return c;
}

inline double pow_over_factorial(double c, int i) {
  double v = 1.0;
  for (int k = 1; k <= i; ++k) v *= c / k;
  return v;
}
}  // namespace detail

inline SmoothActivation identity() {
  return {"identity", [](double z) { return z; }, {0.0, 1.0}};
}

inline SmoothActivation constant(double value) {
  return {"constant", [value](double) { return value; }, {value}};
}

/// sin(c z)
inline SmoothActivation sine(double c, int degree = kDefaultDegree) {
  auto coef = [c](int i) {
    if (i % 2 == 0) return 0.0;
    const double s = ((i - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    return s * detail::pow_over_factorial(c, i);
  };
  return {"sin", [c](double z) { return std::sin(c * z); }, detail::entire_series(coef, degree)};
}

/// cos(c z)
inline SmoothActivation cosine(double c, int degree = kDefaultDegree) {
  auto coef = [c](int i) {
    if (i % 2 == 1) return 0.0;
    const double s = (i / 2) % 2 == 0 ? 1.0 : -1.0;
    return s * detail::pow_over_factorial(c, i);
  };
  return {"cos", [c](double z) { return std::cos(c * z); }, detail::entire_series(coef, degree)};
}

/// e^{c z} - 1
inline SmoothActivation exp_minus_one(double c, int degree = kDefaultDegree) {
  auto coef = [c](int i) { return i == 0 ? 0.0 : detail::pow_over_factorial(c, i); };
  return {"expm1", [c](double z) { return std::expm1(c * z); }, detail::entire_series(coef, degree)};
}

/// Polynomial with the given coefficients (lowest degree first).
inline SmoothActivation polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw InvalidParameter("polynomial: empty coefficient list");
  SmoothActivation out{"polynomial", nullptr, std::move(coeffs)};
  out.evaluator = [c = out.taylor](double z) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
  };
  return out;
}

/// Taylor polynomial of tanh(c z) truncated at `degree`. tanh itself is not entire,
/// so the truncated polynomial is the activation.
inline SmoothActivation tanh_truncated(double c, int degree = 9) {
  if (degree < 1) throw InvalidParameter("tanh_truncated: degree must be >= 1");
  // t' = 1 - t^2, t(0) = 0  =>  (n+1) t_{n+1} = [n==0] - sum_k t_k t_{n-k}
  std::vector<double> t(static_cast<std::size_t>(degree) + 1, 0.0);
  for (int n = 0; n < degree; ++n) {
    double conv = 0.0;
    for (int k = 0; k <= n; ++k) conv += t[k] * t[n - k];
    t[n + 1] = ((n == 0 ? 1.0 : 0.0) - conv) / (n + 1);
  }
  double scale = 1.0;
  for (auto& v : t) {
    v *= scale;
    scale *= c;
  }
  auto out = polynomial(std::move(t));
  out.name = "tanh-truncated";
  return out;
}

/// Lookup by catalogue name: identity, constant, sin, cos, expm1, tanh-truncated.
inline SmoothActivation by_name(const std::string& name, double c = 1.0) {
  if (name == "identity") return identity();
  if (name == "constant") return constant(c);
  if (name == "sin") return sine(c);
  if (name == "cos") return cosine(c);
  if (name == "expm1") return exp_minus_one(c);
  if (name == "tanh-truncated") return tanh_truncated(c);
  throw InvalidParameter("unknown activation: " + name);
}

}  // namespace activations
}  // namespace overparam
