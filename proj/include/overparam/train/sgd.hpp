#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "overparam/core/rng.hpp"
#include "overparam/nets/three_layer.hpp"
#include "overparam/nets/two_layer.hpp"
#include "overparam/targets/dataset.hpp"
#include "overparam/train/loss.hpp"
#include "overparam/train/models.hpp"
#include "overparam/train/objectives.hpp"
#include "overparam/train/train_log.hpp"

namespace overparam {

// ---------------------------------------------------------------------------
// Experiment mode: minibatch SGD with momentum, weight decay and a step drop.

enum class FirstLayerPenalty { None, RowL4 };

struct ExperimentSgdConfig {
  double lr = 1e-3;
  double wd = 0.0;
  double momentum = 0.9;
  Index batch = 50;
  int epochs = 10;
  int lr_drop_epoch = -1;  // -1: half of epochs; 0: never
  double lr_drop_factor = 0.1;
  // RowL4 replaces decay on the first layer with wd * sum_i ||w_i||^4.
  FirstLayerPenalty penalty = FirstLayerPenalty::None;
  int eval_every = 0;  // 0: evaluate only after the last epoch
  LossKind loss = LossKind::Squared;
};

/// Data in the scalar type used for training.
template <class S>
struct TrainData {
  MatrixT<S> X;
  MatrixT<S> Y;

  TrainData() = default;
  explicit TrainData(const Dataset& ds) : X(ds.inputs.cast<S>()), Y(ds.labels.cast<S>()) {}
  Index size() const { return X.rows(); }
};

/// Mean loss of a model's predictions, evaluated in chunks.
template <class Model, class S = typename Model::Scalar>
double mean_loss(const Model& model, const TrainData<S>& data, const LossFn& loss, Index chunk = 2000) {
  double total = 0.0;
  for (Index s = 0; s < data.size(); s += chunk) {
    const Index n = std::min(chunk, data.size() - s);
    const MatrixT<S> P = model.predict(data.X.middleRows(s, n));
    total += loss.batch<S>(P, data.Y.middleRows(s, n), nullptr, 1.0);
  }
  return total / static_cast<double>(data.size());
}

template <class M>
concept HasFirstLayer = requires(const M& m) { m.first_layer(); };

template <class Model, class S = typename Model::Scalar>
TrainLog train_minibatch(Model& model, const TrainData<S>& train, const TrainData<S>* test,
                         const ExperimentSgdConfig& cfg, RngStream& rng) {
  if (!(cfg.lr >= 0.0) || cfg.batch < 1 || cfg.epochs < 0) throw InvalidParameter("train_minibatch: bad config");
  const LossFn loss{cfg.loss};
  const int drop = cfg.lr_drop_epoch < 0 ? cfg.epochs / 2 : cfg.lr_drop_epoch;
  const Index N = train.size();
  auto params = model.params();
  std::vector<MatrixT<S>> grads, bufs(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) bufs[i] = MatrixT<S>::Zero(params[i]->rows(), params[i]->cols());

  TrainLog log;
  double lr = cfg.lr;
  MatrixT<S> Xb, Yb, G;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (drop > 0 && epoch == drop + 1) lr *= cfg.lr_drop_factor;
    const auto perm = random_permutation(N, rng);
    double epoch_loss = 0.0, reg_value = 0.0, gnorm = 0.0;
    for (Index s = 0; s < N; s += cfg.batch) {
      const Index B = std::min(cfg.batch, N - s);
      Xb.resize(B, train.X.cols());
      Yb.resize(B, train.Y.cols());
      for (Index i = 0; i < B; ++i) {
        Xb.row(i) = train.X.row(perm[static_cast<std::size_t>(s + i)]);
        Yb.row(i) = train.Y.row(perm[static_cast<std::size_t>(s + i)]);
      }
      const MatrixT<S> P = model.forward(Xb);
      epoch_loss += loss.batch<S>(P, Yb, &G, 1.0 / static_cast<double>(B));
      model.backward(Xb, G, grads);

      const auto targets = model.decay_targets();
      reg_value = 0.0;
      for (std::size_t i = 0; i < params.size(); ++i) {
        const bool penalized = cfg.penalty == FirstLayerPenalty::RowL4 && i == 0;
        if (cfg.wd != 0.0 && !penalized) {
          grads[i] += static_cast<S>(cfg.wd) * (*targets[i]);
          reg_value += 0.5 * cfg.wd * targets[i]->template cast<double>().squaredNorm();
        }
      }
      if constexpr (HasFirstLayer<Model>) {
        if (cfg.penalty == FirstLayerPenalty::RowL4 && cfg.wd != 0.0) {
          const MatrixT<S>& W = model.first_layer();
          const VectorT<S> sq = W.rowwise().squaredNorm();
          grads[0].array() += (W.array().colwise() * sq.array()) * static_cast<S>(4.0 * cfg.wd);
          reg_value += cfg.wd * row_l4_pow4(W);
        }
      }
      gnorm = 0.0;
      for (std::size_t i = 0; i < params.size(); ++i) {
        gnorm += grads[i].template cast<double>().squaredNorm();
        if (cfg.momentum != 0.0) {
          bufs[i] = static_cast<S>(cfg.momentum) * bufs[i] + grads[i];
          *params[i] -= static_cast<S>(lr) * bufs[i];
        } else {
          *params[i] -= static_cast<S>(lr) * grads[i];
        }
      }
      gnorm = std::sqrt(gnorm);
    }
    epoch_loss /= static_cast<double>(N);
    if (!std::isfinite(epoch_loss) || !std::isfinite(gnorm)) {
      log.status = RunStatus::Diverged;
      log.message = "non-finite loss at epoch " + std::to_string(epoch);
      log.records.push_back({epoch, std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN(), 1.0, reg_value, gnorm, lr});
      return log;
    }
    const bool eval = epoch == cfg.epochs || (cfg.eval_every > 0 && epoch % cfg.eval_every == 0);
    if (eval) {
      EpochRecord rec{epoch, mean_loss(model, train, loss), std::numeric_limits<double>::quiet_NaN(), 1.0,
                      reg_value, gnorm, lr};
      if (test) rec.test_loss = mean_loss(model, *test, loss);
      if (!std::isfinite(rec.train_loss)) {
        log.status = RunStatus::Diverged;
        log.message = "non-finite evaluation loss";
      }
      log.records.push_back(rec);
      if (!log.ok()) return log;
    }
  }
  if (cfg.epochs == 0) {
    EpochRecord rec{0, mean_loss(model, train, loss), std::numeric_limits<double>::quiet_NaN(), 1.0, 0.0, 0.0, lr};
    if (test) rec.test_loss = mean_loss(model, *test, loss);
    log.records.push_back(rec);
  }
  return log;
}

// ---------------------------------------------------------------------------
// Theory mode.

struct TheorySgdConfig {
  double eta = 1e-2;
  int steps = 100;       // two-layer: SGD steps; three-layer: outer rounds
  int inner_steps = 10;  // three-layer: noisy SGD steps per round
  Index batch = 1;
  double noise_scale = -1.0;  // -1: use eta
  int j_star_samples = 16;
  int log_every = 1;
  LossKind loss = LossKind::Huber;

  double noise() const { return noise_scale < 0.0 ? eta : noise_scale; }
};

namespace detail {
inline std::vector<Index> sample_indices(Index N, Index B, RngStream& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(B));
  for (auto& i : idx) i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(N)));
  return idx;
}

template <class S>
void gather(const TrainData<S>& data, const std::vector<Index>& idx, MatrixT<S>& X, MatrixT<S>& Y) {
  X.resize(static_cast<Index>(idx.size()), data.X.cols());
  Y.resize(static_cast<Index>(idx.size()), data.Y.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    X.row(static_cast<Index>(i)) = data.X.row(idx[i]);
    Y.row(static_cast<Index>(i)) = data.Y.row(idx[i]);
  }
}
}  // namespace detail

/// Plain SGD on the two-layer increment: W' <- W' - eta * grad of the sampled loss.
template <class S>
TrainLog sgd_two_layer(TwoLayerNet<S>& net, const TrainData<S>& data, const TheorySgdConfig& cfg, RngStream& rng) {
  if (!(cfg.eta >= 0.0)) throw InvalidParameter("sgd_two_layer: eta must be >= 0");
  const LossFn loss{cfg.loss};
  TwoLayerModel<S> model(net);
  TrainLog log;
  auto record = [&](int step) {
    log.records.push_back({step, mean_loss(model, data, loss), std::numeric_limits<double>::quiet_NaN(), 1.0, 0.0,
                           0.0, cfg.eta});
  };
  record(0);
  MatrixT<S> X, Y, G;
  std::vector<MatrixT<S>> grads;
  for (int t = 1; t <= cfg.steps; ++t) {
    const auto idx = detail::sample_indices(data.size(), cfg.batch, rng);
    detail::gather(data, idx, X, Y);
    const MatrixT<S> P = model.forward(X);
    const double l = loss.batch<S>(P, Y, &G, 1.0 / static_cast<double>(cfg.batch));
    model.backward(X, G, grads);
    net.w_delta -= static_cast<S>(cfg.eta) * grads[0];
    if (!std::isfinite(l) || !net.w_delta.allFinite()) {
      log.status = RunStatus::Diverged;
      log.message = "non-finite loss at step " + std::to_string(t);
      return log;
    }
    if (t == cfg.steps || (cfg.log_every > 0 && t % cfg.log_every == 0)) record(t);
  }
  return log;
}

enum class ObjectiveKind { L1, L2 };

/// Inputs of the three-layer algorithm besides data and step sizes.
struct ThreeLayerTheoryParams {
  ObjectiveKind variant = ObjectiveKind::L2;
  RegParams reg;
  SmoothingParams smoothing;
  bool identity_sigma = false;  // test hook: Sigma = I in every draw
};

/// Independent random sub-streams of one three-layer run.
struct ThreeLayerStreams {
  RngStream data, smoothing, sigma, noise, j_star, sigma_hat;

  explicit ThreeLayerStreams(const RngStream& root)
      : data(root.split(1)),
        smoothing(root.split(2)),
        sigma(root.split(3)),
        noise(root.split(4)),
        j_star(root.split(5)),
        sigma_hat(root.split(6)) {}
};

template <class S>
VectorT<S> draw_sigma(Index m1, const ThreeLayerTheoryParams& p, RngStream& rng) {
  if (p.variant == ObjectiveKind::L1 || p.identity_sigma) return VectorT<S>::Ones(m1);
  return sample_sign_diagonal<S>(m1, rng);
}

struct InnerResult {
  std::vector<double> trace;
  RunStatus status = RunStatus::Ok;
};

/// T_w steps of noisy SGD on the chosen objective with lambda held fixed. Each step
/// samples a batch, fresh smoothing matrices and (for L2) a fresh Sigma, takes a
/// gradient step and adds an isotropic Gaussian perturbation of scale noise().
template <class S>
InnerResult noisy_sgd_inner(ThreeLayerNet<S>& net, const TrainData<S>& data, const ThreeLayerTheoryParams& p,
                            const TheorySgdConfig& cfg, int inner_steps, ThreeLayerStreams& st) {
  const LossFn loss{cfg.loss};
  const double nu = cfg.noise();
  InnerResult res;
  MatrixT<S> X, Y, gW, gV;
  for (int s = 0; s < inner_steps; ++s) {
    const auto idx = detail::sample_indices(data.size(), cfg.batch, st.data);
    detail::gather(data, idx, X, Y);
    auto nd = draw_smoothing(net, p.smoothing, st.smoothing);
    nd.sigma = draw_sigma<S>(net.m1(), p, st.sigma);
    const double value = objective_value_and_grad(net, X, Y, loss, p.reg, nd, &gW, &gV);
    res.trace.push_back(value);
    net.w_delta -= static_cast<S>(cfg.eta) * gW;
    net.v_delta -= static_cast<S>(cfg.eta) * gV;
    if (nu > 0.0) {
      net.w_delta += sample_gaussian_matrix<S>(net.m1(), net.d(), nu * nu, st.noise);
      net.v_delta += sample_gaussian_matrix<S>(net.m2(), net.m1(), nu * nu, st.noise);
    }
    if (!std::isfinite(value) || !net.w_delta.allFinite() || !net.v_delta.allFinite()) {
      res.status = RunStatus::Diverged;
      return res;
    }
  }
  return res;
}

/// Index of the smallest value; ties go to the smallest index.
inline int argmin_first(const std::vector<double>& v) {
  if (v.empty()) throw InvalidParameter("argmin_first: empty list");
  int best = 0;
  for (int j = 1; j < static_cast<int>(v.size()); ++j)
    if (v[static_cast<std::size_t>(j)] < v[static_cast<std::size_t>(best)]) best = j;
  return best;
}

/// Three-layer training: T rounds of noisy SGD on the chosen objective, each followed by
/// lambda <- (1 - eta) lambda, then the final noise selection. On return the net holds
/// W' = W^{rho,j*} + Sigma_hat W' and V' = V^{rho,j*} + V' Sigma_hat.
template <class S>
TrainLog sgd_three_layer(ThreeLayerNet<S>& net, const TrainData<S>& data, const ThreeLayerTheoryParams& p,
                         const TheorySgdConfig& cfg, const RngStream& root) {
  if (!(cfg.eta >= 0.0 && cfg.eta < 1.0)) throw InvalidParameter("sgd_three_layer: eta must be in [0, 1)");
  if (cfg.j_star_samples < 1) throw InvalidParameter("sgd_three_layer: need at least one noise sample");
  ThreeLayerStreams st(root);
  const LossFn loss{cfg.loss};
  ThreeLayerModel<S> plain(net);
  TrainLog log;
  const double decay = 1.0 - cfg.eta;
  for (int t = 1; t <= cfg.steps; ++t) {
    const auto inner = noisy_sgd_inner(net, data, p, cfg, cfg.inner_steps, st);
    const double last = inner.trace.empty() ? 0.0 : inner.trace.back();
    if (inner.status != RunStatus::Ok) {
      log.status = RunStatus::Diverged;
      log.message = "non-finite objective in round " + std::to_string(t);
      log.records.push_back({t, last, std::numeric_limits<double>::quiet_NaN(), net.lambda, 0.0, 0.0, cfg.eta});
      return log;
    }
    // Closed form of the recursion so no rounding accumulates across rounds.
    net.lambda = std::pow(decay, t);
    if (t == cfg.steps || (cfg.log_every > 0 && t % cfg.log_every == 0))
      log.records.push_back({t, mean_loss(plain, data, loss), std::numeric_limits<double>::quiet_NaN(), net.lambda,
                             regularizer(net, p.reg), 0.0, cfg.eta});
  }

  // Final step: one Sigma_hat and J smoothing pairs; keep the pair with the lowest empirical loss.
  const VectorT<S> sigma_hat = draw_sigma<S>(net.m1(), p, st.sigma_hat);
  std::vector<NoiseDraw<S>> draws;
  for (int j = 0; j < cfg.j_star_samples; ++j) {
    auto nd = draw_smoothing(net, p.smoothing, st.j_star);
    nd.sigma = sigma_hat;
    const double value = objective_value_and_grad(net, data.X, data.Y, loss, RegParams{}, nd);
    log.j_losses.push_back(value);
    draws.push_back(std::move(nd));
  }
  log.j_star = argmin_first(log.j_losses);
  const auto& best = draws[static_cast<std::size_t>(log.j_star)];
  net.w_delta = (best.w_rho + sigma_hat.asDiagonal() * net.w_delta).eval();
  net.v_delta = (best.v_rho + net.v_delta * sigma_hat.asDiagonal()).eval();
  log.records.push_back({cfg.steps + 1, mean_loss(plain, data, loss), std::numeric_limits<double>::quiet_NaN(),
                         net.lambda, regularizer(net, p.reg), 0.0, cfg.eta});
  return log;
}

// ---------------------------------------------------------------------------
// Generic noisy SGD on a vector parameter, used for saddle-escape checks.

struct NoisySgdResult {
  Vector x;
  std::vector<double> trace;
  RunStatus status = RunStatus::Ok;
};

/// x <- x - eta grad f(x) + noise_scale * xi with xi ~ N(0, I). f returns the value and
/// fills the gradient.
template <class F>
NoisySgdResult noisy_sgd(F&& value_and_grad, Vector x0, double eta, double noise_scale, int steps, RngStream& rng) {
  NoisySgdResult res{std::move(x0), {}, RunStatus::Ok};
  Vector g(res.x.size());
  for (int t = 0; t < steps; ++t) {
    const double v = value_and_grad(res.x, g);
    res.trace.push_back(v);
    res.x -= eta * g;
    if (noise_scale > 0.0) res.x += sample_gaussian_vector(res.x.size(), noise_scale * noise_scale, rng);
    if (!std::isfinite(v) || !res.x.allFinite()) {
      res.status = RunStatus::Diverged;
      return res;
    }
  }
  res.trace.push_back(value_and_grad(res.x, g));
  return res;
}

}  // namespace overparam
