#pragma once

#include <string>

#include "overparam/core/error.hpp"
#include "overparam/core/numerics.hpp"

namespace overparam {

/// Theory: output weights a ~ N(0, eps_a^2). Experiment: a ~ N(0, 1).
enum class InitProfile { Theory, Experiment };

/// Which biases survive in a pseudo network.
///   Full: all biases kept.
///   Semi: the bias feeding the output ReLU is dropped (b for two-layer, b2 for three-layer).
///   None: every bias dropped.
enum class BiasMode { Full, Semi, None };

enum class SignAt { Init, Current };

inline const char* to_string(InitProfile p) { return p == InitProfile::Theory ? "theory" : "experiment"; }

inline InitProfile profile_from_string(const std::string& s) {
  if (s == "theory") return InitProfile::Theory;
  if (s == "experiment") return InitProfile::Experiment;
  throw InvalidParameter("unknown init profile: " + s);
}

/// 0/1 activation indicators. dv is empty for two-layer nets.
struct SignPattern {
  Vector dw;
  Vector dv;

  bool operator==(const SignPattern& o) const { return dw == o.dw && dv == o.dv; }
};

template <class S, class Derived>
VectorT<S> indicator(const Eigen::MatrixBase<Derived>& z) {
  return z.unaryExpr([](S v) { return relu_grad(v); });
}

template <class S, class Derived>
MatrixT<S> relu_of(const Eigen::MatrixBase<Derived>& z) {
  return z.unaryExpr([](S v) { return relu(v); });
}

template <class S, class Derived>
MatrixT<S> indicator_of(const Eigen::MatrixBase<Derived>& z) {
  return z.unaryExpr([](S v) { return relu_grad(v); });
}

}  // namespace overparam
