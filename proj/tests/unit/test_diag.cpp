#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "overparam/diag/coupling.hpp"
#include "overparam/diag/curvature.hpp"
#include "overparam/diag/norm_ratio.hpp"
#include "overparam/train/sgd.hpp"

using namespace overparam;

namespace {
Vector unit_input(Index d, RngStream& rng) {
  Vector x = sample_gaussian_vector(d, 1.0, rng);
  return x / x.norm();
}
}  // namespace

TEST(Coupling, ZeroPerturbation) {
  RngStream rng(1);
  const auto net = init_three_layer<double>(200, 150, 5, 2, InitProfile::Theory, rng);
  for (int t = 0; t < 20; ++t) {
    const Vector x = unit_input(5, rng);
    const auto r = count_sign_flips(net, x, Matrix::Zero(200, 5), Matrix::Zero(150, 200));
    EXPECT_EQ(r.flips1, 0);
    EXPECT_EQ(r.flips2, 0);
    EXPECT_EQ(r.output_gap, 0.0);
  }
}

TEST(Coupling, CountsBoundedAndReproducible) {
  auto run = [] {
    RngStream rng(2);
    const auto net = init_three_layer<double>(300, 100, 6, 1, InitProfile::Theory, rng);
    const Vector x = unit_input(6, rng);
    const Matrix Wp = random_row_l4_perturbation(300, 6, 0.5, rng);
    const Matrix Vp = sample_gaussian_matrix<double>(100, 300, 1e-4, rng);
    return count_sign_flips(net, x, Wp, Vp);
  };
  const auto a = run(), b = run();
  EXPECT_EQ(a.flips1, b.flips1);
  EXPECT_EQ(a.flips2, b.flips2);
  EXPECT_EQ(a.output_gap, b.output_gap);
  EXPECT_LE(a.flips1, 300);
  EXPECT_LE(a.flips2, 100);
  EXPECT_GT(a.flips1, 0);
  EXPECT_NEAR(a.tau_w, 0.5, 1e-12);
}

TEST(Coupling, CsvRow) {
  CouplingReport r;
  r.m1 = 10;
  r.m2 = 20;
  r.tau_w = 0.5;
  r.seed = 3;
  r.flips1 = 4;
  std::ostringstream os;
  write_coupling_row(os, r);
  EXPECT_EQ(os.str(), "10,20,0.5,0,3,4,0,0\n");
  EXPECT_STREQ(kCouplingHeader, "m1,m2,tau_w,tau_v,seed,flips1,flips2,output_gap");
}

TEST(Coupling, AdversarialBudgetAndFlips) {
  RngStream rng(4);
  const auto net = init_three_layer<double>(1000, 50, 8, 1, InitProfile::Theory, rng);
  const Vector x = unit_input(8, rng);
  const double tau = 0.01;
  const Matrix Wp = adversarial_first_layer(net, x, tau);
  EXPECT_LE(row_l4_pow4(Wp), std::pow(tau, 4) * (1 + 1e-12));
  const auto r = count_sign_flips(net, x, Wp, Matrix::Zero(50, 1000));
  const Index perturbed = static_cast<Index>((Wp.rowwise().squaredNorm().array() > 0).count());
  EXPECT_EQ(r.flips1, perturbed);
  EXPECT_GT(r.flips1, 0);
}

namespace {
double median_flips(Index m1, double tau, int seeds) {
  std::vector<double> f;
  for (int s = 0; s < seeds; ++s) {
    RngStream rng(1000 + static_cast<std::uint64_t>(s));
    const auto net = init_three_layer<double>(m1, 10, 8, 1, InitProfile::Theory, rng);
    const Vector x = unit_input(8, rng);
    const auto r = count_sign_flips(net, x, adversarial_first_layer(net, x, tau), Matrix::Zero(10, m1));
    f.push_back(static_cast<double>(r.flips1));
  }
  return median(f);
}
}  // namespace

TEST(Coupling, FlipScalingSlope) {
  std::vector<double> lx, ly;
  for (Index m : {500, 2000, 8000}) {
    lx.push_back(std::log(static_cast<double>(m)));
    ly.push_back(std::log(median_flips(m, 0.005, 15)));
  }
  const double slope = ls_slope(lx, ly);
  RecordProperty("slope", std::to_string(slope));
  EXPECT_GE(slope, 1.05);
  EXPECT_LE(slope, 1.35);
}

TEST(Coupling, FlipsMonotoneInTau) {
  double prev = -1;
  for (double tau : {0.0025, 0.005, 0.01, 0.02}) {
    const double f = median_flips(2000, tau, 9);
    EXPECT_GT(f, prev) << tau;
    prev = f;
  }
}

TEST(Curvature, QuadraticsAreExact) {
  ProbeObjective sq = [](const Vector& p, RngStream&) { return p.squaredNorm(); };
  ProbeObjective saddle = [](const Vector& p, RngStream&) { return p(0) * p(0) - p(1) * p(1); };
  RngStream rng(5);
  for (double eta : {1e-2, 1e-4, 1e-6}) {
    for (int t = 0; t < 5; ++t) {
      const Vector x = sample_gaussian_vector(3, 1.0, rng);
      const Vector u = unit_input(3, rng);
      EXPECT_NEAR(curvature_probe(sq, x, u, eta, 1, rng).estimate, 2.0, 1e-6);
    }
    Vector ev = Vector::Zero(2);
    ev(1) = 1;
    EXPECT_NEAR(curvature_probe(saddle, Vector::Constant(2, 0.3), ev, eta, 3, rng).estimate, -2.0, 1e-6);
  }
}

TEST(Curvature, Errors) {
  ProbeObjective f = [](const Vector& p, RngStream&) { return p.squaredNorm(); };
  const Vector x = Vector::Zero(2), u = Vector::Unit(2, 0);
  RngStream rng(6);
  EXPECT_THROW(curvature_probe(f, x, u, 0.0, 1, rng), InvalidParameter);
  EXPECT_THROW(curvature_probe(f, x, (2 * u).eval(), 1e-4, 1, rng), InvalidInput);
  EXPECT_THROW(curvature_probe(f, x, Vector::Unit(3, 0), 1e-4, 1, rng), InvalidInput);
}

TEST(Curvature, SmoothedNetworkObjectiveIsStable) {
  RngStream rng(7);
  const auto net = init_three_layer<double>(16, 12, 4, 1, InitProfile::Theory, rng);
  Matrix X(8, 4);
  for (Index n = 0; n < 8; ++n) X.row(n) = unit_input(4, rng).transpose();
  const Matrix Y = Matrix::Constant(8, 1, 0.5);
  const auto f = smoothed_objective(net, X, Y, LossFn{LossKind::Huber}, RegParams{0.1, 0.1}, SmoothingParams{0.05, 0.05});
  const Vector p0 = flatten_deltas(net);
  const Vector u = unit_input(p0.size(), rng);
  const auto a = curvature_probe(f, p0, u, 1e-4, 4000, RngStream(8));
  const auto b = curvature_probe(f, p0, u, 1e-6, 4000, RngStream(8));
  RecordProperty("eta1e-4", std::to_string(a.estimate));
  RecordProperty("eta1e-6", std::to_string(b.estimate));
  ASSERT_TRUE(std::isfinite(a.estimate) && std::isfinite(b.estimate));
  EXPECT_LE(std::abs(a.estimate - b.estimate), 0.2 * std::abs(a.estimate));
}

TEST(NormRatio, Examples) {
  Matrix eq(4, 3);
  eq << 1, 0, 0, 0, -1, 0, 0, 0, 1, 0.6, 0.8, 0;
  EXPECT_EQ(norm_ratio(eq), 1.0);
  Matrix single = Matrix::Zero(10, 3);
  single.row(4) << 0.5, -2, 1;
  EXPECT_EQ(norm_ratio(single), 10.0);
  RngStream rng(9);
  const Matrix g = sample_gaussian_matrix<double>(100, 4, 1.0, rng);
  EXPECT_GE(norm_ratio(g), 1.0);
  EXPECT_LE(norm_ratio(g), 100.0);
  EXPECT_THROW(norm_ratio(Matrix::Zero(3, 3)), InvalidInput);
}

TEST(NormRatio, RangeOnRandomMatrices) {
  RngStream rng(10);
  for (int t = 0; t < 1000; ++t) {
    const Index m = 1 + static_cast<Index>(rng.below(60)), d = 1 + static_cast<Index>(rng.below(8));
    Matrix W = sample_gaussian_matrix<double>(m, d, 1.0, rng);
    // sparse rows and heavy rows too
    for (Index i = 0; i < m; ++i) {
      if (rng.uniform() < 0.3) W.row(i).setZero();
      if (rng.uniform() < 0.1) W.row(i) *= 100;
    }
    if (W.isZero(0.0)) W(0, 0) = 1;
    const double r = norm_ratio(W);
    EXPECT_GE(r, 1.0 - 1e-12);
    EXPECT_LE(r, static_cast<double>(m) * (1 + 1e-12));
  }
}

TEST(NormRatio, FloatMatrices) {
  MatrixT<float> w = MatrixT<float>::Ones(5, 2);
  EXPECT_DOUBLE_EQ(norm_ratio(w), 1.0);
}

TEST(GeneralizationGap, IdenticalSetsAndErrors) {
  RngStream rng(11);
  auto net = init_two_layer<double>(30, 4, 1, 1.0, InitProfile::Experiment, rng);
  TwoLayerModel<double> model(net);
  Dataset ds;
  ds.inputs = sample_gaussian_matrix<double>(40, 4, 0.25, rng);
  ds.labels = sample_gaussian_matrix<double>(40, 1, 0.25, rng);
  const TrainData<double> tr(ds);
  ExperimentSgdConfig cfg;
  cfg.lr = 0.01;
  cfg.epochs = 3;
  cfg.eval_every = 1;
  const auto log = train_minibatch(model, tr, &tr, cfg, rng);
  EXPECT_EQ(generalization_gap(log), 0.0);

  TrainLog empty;
  EXPECT_THROW(generalization_gap(empty), InvalidInput);
  TrainLog no_test;
  no_test.records.push_back({1, 0.5, std::nan(""), 1.0, 0.0, 0.0, 0.1});
  EXPECT_THROW(generalization_gap(no_test), InvalidInput);
}
