#pragma once

#include "overparam/nets/features.hpp"
#include "overparam/train/models.hpp"
#include "overparam/train/sgd.hpp"

namespace overparam {

struct LinearBaselineResult {
  TrainLog log;
  Matrix weights;
};

/// SGD on a linear model over a frozen feature map. Weights start at zero.
/// For NTK features pass the network output at init as `offset` to train the
/// linearized model rather than the pure kernel regressor.
inline LinearBaselineResult train_linear_baseline(const FeatureMap& features, Index k, const Dataset& train,
                                                  const Dataset* test, const ExperimentSgdConfig& cfg,
                                                  RngStream& rng, LinearFeatureModel::Offset offset = {}) {
  LinearFeatureModel model(features, k, std::move(offset));
  const TrainData<double> tr(train);
  TrainData<double> te;
  if (test) te = TrainData<double>(*test);
  LinearBaselineResult res;
  res.log = train_minibatch(model, tr, test ? &te : nullptr, cfg, rng);
  res.weights = model.weights();
  return res;
}

}  // namespace overparam
