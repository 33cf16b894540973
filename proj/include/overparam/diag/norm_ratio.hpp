#pragma once

#include <cmath>

#include "overparam/core/error.hpp"
#include "overparam/core/numerics.hpp"
#include "overparam/train/train_log.hpp"

namespace overparam {

/// m ||W||_{2,4}^4 / ||W||_F^4 with m = rows. 1 when all rows have equal norm, m for a single nonzero row.
template <class Derived>
double norm_ratio(const Eigen::MatrixBase<Derived>& W) {
  Eigen::ArrayXd sq = W.template cast<double>().rowwise().squaredNorm().array();
  const double top = sq.maxCoeff();
  if (!(top > 0.0)) throw InvalidInput("norm_ratio: zero matrix");
  // relative to the largest row, equal rows sum to exactly m
  sq /= top;
  const double fro2 = sq.sum();
  return static_cast<double>(W.rows()) * sq.square().sum() / (fro2 * fro2);
}

/// Final test loss minus final train loss.
inline double generalization_gap(const TrainLog& log) {
  if (log.records.empty()) throw InvalidInput("generalization_gap: empty log");
  const auto& r = log.records.back();
  if (!std::isfinite(r.test_loss) || !std::isfinite(r.train_loss))
    throw InvalidInput("generalization_gap: final record lacks train or test loss");
  return r.test_loss - r.train_loss;
}

}  // namespace overparam
