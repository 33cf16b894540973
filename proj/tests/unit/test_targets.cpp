#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "overparam/targets/activation.hpp"
#include "overparam/targets/concept.hpp"
#include "overparam/targets/dataset.hpp"

using namespace overparam;

namespace {
Vector unit(Index d, Index i) {
  Vector e = Vector::Zero(d);
  e(i) = 1.0;
  return e;
}

Vector random_unit(Index d, RngStream& rng) {
  Vector g = sample_gaussian_vector(d, 1.0, rng);
  return g / g.norm();
}

TwoLayerTarget random_two_layer(Index p, Index k, Index d, RngStream& rng) {
  TwoLayerTarget t;
  t.w1.resize(p, d);
  t.w2.resize(p, d);
  for (Index i = 0; i < p; ++i) {
    t.w1.row(i) = random_unit(d, rng).transpose();
    t.w2.row(i) = random_unit(d, rng).transpose();
    const int pick = static_cast<int>(rng.below(3));
    t.phis.push_back(pick == 0 ? activations::sine(2.0) : pick == 1 ? activations::cosine(1.5)
                                                                     : activations::exp_minus_one(0.5));
  }
  t.astar = Matrix::NullaryExpr(k, p, [&] { return 2 * rng.uniform() - 1; });
  return t;
}
}  // namespace

TEST(Activation, CatalogueMatchesSeries) {
  for (const auto& act : {activations::sine(3.0), activations::sine(1.0), activations::cosine(7.0),
                          activations::cosine(1.0), activations::exp_minus_one(2.0), activations::identity(),
                          activations::constant(0.3), activations::tanh_truncated(1.0, 11),
                          activations::polynomial({1.0, -2.0, 0.5})}) {
    EXPECT_LE(act.series_error(), 1e-10) << act.name;
  }
}

TEST(Activation, DefaultDegreeIsAFloor) {
  EXPECT_GE(activations::sine(1.0).degree(), 29);
  EXPECT_GT(activations::cosine(7.0).degree(), 30);
}

TEST(Activation, TanhCoefficients) {
  // tanh z = z - z^3/3 + 2z^5/15 - 17z^7/315
  const auto t = activations::tanh_truncated(1.0, 7);
  ASSERT_EQ(t.taylor.size(), 8u);
  EXPECT_NEAR(t.taylor[1], 1.0, 1e-15);
  EXPECT_NEAR(t.taylor[3], -1.0 / 3, 1e-15);
  EXPECT_NEAR(t.taylor[5], 2.0 / 15, 1e-15);
  EXPECT_NEAR(t.taylor[7], -17.0 / 315, 1e-15);
  EXPECT_NEAR(t(0.1), std::tanh(0.1), 1e-9);
}

TEST(TwoLayerTarget, Examples) {
  TwoLayerTarget t;
  t.w1 = unit(3, 0).transpose();
  t.w2 = unit(3, 0).transpose();
  t.astar = Matrix::Ones(1, 1);
  t.phis = {activations::identity()};
  EXPECT_DOUBLE_EQ(eval_two_layer_target(t, unit(3, 0))(0), 1.0);

  t.astar.setZero();
  EXPECT_EQ(eval_two_layer_target(t, unit(3, 0))(0), 0.0);

  t.astar.setOnes();
  t.w2 = unit(3, 1).transpose();
  t.phis = {activations::sine(3.0)};
  Vector x = (unit(3, 0) + unit(3, 1)) / std::sqrt(2.0);
  const double oracle = std::sin(3.0 / std::sqrt(2.0)) / std::sqrt(2.0);
  EXPECT_NEAR(eval_two_layer_target(t, x)(0), oracle, 1e-14);
  EXPECT_NEAR(oracle, 0.602632, 1e-6);

  EXPECT_THROW(eval_two_layer_target(t, unit(4, 0)), InvalidInput);
}

TEST(TwoLayerTarget, HomogeneousInAstar) {
  RngStream rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = random_two_layer(4, 2, 5, rng);
    const Vector x = random_unit(5, rng);
    const Vector base = eval_two_layer_target(t, x);
    const double c = rng.uniform() * 0.9;
    t.astar *= c;
    EXPECT_TRUE(eval_two_layer_target(t, x).isApprox(c * base, 1e-12) || base.norm() < 1e-14);
  }
}

TEST(TwoLayerTarget, PermutationInvariant) {
  RngStream rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = random_two_layer(5, 2, 4, rng);
    const Vector x = random_unit(4, rng);
    const Vector base = eval_two_layer_target(t, x);
    auto perm = random_permutation(5, rng);
    TwoLayerTarget s = t;
    for (Index i = 0; i < 5; ++i) {
      const Index j = perm[static_cast<std::size_t>(i)];
      s.w1.row(i) = t.w1.row(j);
      s.w2.row(i) = t.w2.row(j);
      s.astar.col(i) = t.astar.col(j);
      s.phis[static_cast<std::size_t>(i)] = t.phis[static_cast<std::size_t>(j)];
    }
    EXPECT_TRUE(eval_two_layer_target(s, x).isApprox(base, 1e-12));
  }
}

TEST(TwoLayerTarget, ValidateRejectsNonUnit) {
  TwoLayerTarget t;
  t.w1 = Matrix::Constant(1, 2, 1.0);
  t.w2 = unit(2, 0).transpose();
  t.astar = Matrix::Ones(1, 1);
  t.phis = {activations::identity()};
  EXPECT_THROW(t.validate(), InvalidInput);
}

TEST(ThreeLayerTarget, Examples) {
  ThreeLayerTarget t;
  t.w1 = unit(2, 0).transpose();
  t.w2 = unit(2, 0).transpose();
  t.v1 = Matrix::Ones(1, 1);
  t.v2 = Matrix::Ones(1, 1);
  t.astar = Matrix::Ones(1, 1);
  t.phi1 = {activations::identity()};
  t.phi2 = {activations::identity()};
  t.Phi = {activations::identity()};
  t.validate();
  EXPECT_DOUBLE_EQ(eval_three_layer_target(t, unit(2, 0))(0), 1.0);
  t.astar.setZero();
  EXPECT_EQ(eval_three_layer_target(t, unit(2, 0))(0), 0.0);
}

TEST(ThreeLayerTarget, HomogeneousInAstar) {
  RngStream rng(23);
  ThreeLayerTarget t;
  const Index d = 5, p1 = 3, p2 = 4;
  t.w1.resize(p2, d);
  t.w2.resize(p2, d);
  for (Index j = 0; j < p2; ++j) {
    t.w1.row(j) = random_unit(d, rng).transpose();
    t.w2.row(j) = random_unit(d, rng).transpose();
    t.phi1.push_back(activations::sine(1.0));
    t.phi2.push_back(activations::cosine(2.0));
  }
  t.v1.resize(p1, p2);
  t.v2.resize(p1, p2);
  for (Index i = 0; i < p1; ++i) {
    t.v1.row(i) = random_unit(p2, rng).transpose();
    t.v2.row(i) = random_unit(p2, rng).transpose();
    t.Phi.push_back(activations::exp_minus_one(1.0));
  }
  t.astar = Matrix::NullaryExpr(2, p1, [&] { return 2 * rng.uniform() - 1; });
  t.validate();
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = random_unit(d, rng);
    ThreeLayerTarget s = t;
    s.astar *= -0.5;
    EXPECT_TRUE(eval_three_layer_target(s, x).isApprox(-0.5 * eval_three_layer_target(t, x), 1e-12));
  }
}

TEST(BuiltinTarget, Values) {
  const auto sinf = builtin_experiment_target("sin-fig1");
  const double s3 = std::sin(3.0) - 2.0;
  EXPECT_NEAR(sinf(unit(4, 0))(0), s3 * s3, 1e-14);
  EXPECT_NEAR(sinf(unit(4, 0))(0), 3.4554, 1e-4);
  EXPECT_EQ(sinf(unit(4, 2))(0), sinf(unit(4, 0))(0));
  EXPECT_NEAR(sinf(unit(4, 3))(0), 4.0 * std::cos(7.0), 1e-14);
  EXPECT_NEAR(sinf(unit(4, 3))(0), 3.0156, 1e-4);

  const auto tanhf = builtin_experiment_target("tanh-fig6");
  EXPECT_NEAR(tanhf(unit(4, 3))(0), 4.0 * std::tanh(8.0), 1e-14);
  EXPECT_THROW(builtin_experiment_target("nope"), InvalidParameter);
}

TEST(Dataset, UnitNormAndPadding) {
  RngStream rng(31);
  const auto f = builtin_experiment_target("sin-fig1");
  const Dataset raw = generate_dataset(4, 500, f, PaddingMode::Raw, rng);
  ASSERT_EQ(raw.size(), 500);
  ASSERT_EQ(raw.dim(), 4);
  for (Index n = 0; n < raw.size(); ++n) {
    EXPECT_NEAR(raw.inputs.row(n).norm(), 1.0, 1e-12);
    EXPECT_EQ(raw.labels(n, 0), f(raw.inputs.row(n).transpose())(0));
  }
  const Dataset pad = generate_dataset(3, 500, f, PaddingMode::PadHalf, rng);
  ASSERT_EQ(pad.dim(), 4);
  for (Index n = 0; n < pad.size(); ++n) {
    EXPECT_EQ(pad.inputs(n, 3), 0.5);
    EXPECT_NEAR(pad.inputs.row(n).norm(), 1.0, 1e-12);
  }
}

TEST(Dataset, DeterministicAndDisjointStreams) {
  const auto f = builtin_experiment_target("sin-fig1");
  RngStream a(5), b(5);
  const Dataset x = generate_dataset(4, 100, f, PaddingMode::Raw, a);
  const Dataset y = generate_dataset(4, 100, f, PaddingMode::Raw, b);
  EXPECT_EQ(x.inputs, y.inputs);
  EXPECT_EQ(x.labels, y.labels);
  // Train and test sets drawn from split streams share no points.
  RngStream root(5);
  RngStream tr = root.split(1), te = root.split(2);
  const Dataset train = generate_dataset(4, 200, f, PaddingMode::Raw, tr);
  const Dataset test = generate_dataset(4, 200, f, PaddingMode::Raw, te);
  for (Index i = 0; i < 200; ++i)
    for (Index j = 0; j < 200; ++j) EXPECT_NE(train.inputs.row(i), test.inputs.row(j));
}

TEST(Dataset, Errors) {
  RngStream rng(1);
  const auto f = builtin_experiment_target("sin-fig1");
  EXPECT_THROW(generate_dataset(4, 0, f, PaddingMode::Raw, rng), InvalidParameter);
  EXPECT_THROW(generate_dataset(0, 10, f, PaddingMode::Raw, rng), InvalidParameter);
}

TEST(Dataset, CsvHeader) {
  RngStream rng(1);
  const Dataset ds = generate_dataset(4, 3, builtin_experiment_target("sin-fig1"), PaddingMode::Raw, rng);
  std::ostringstream os;
  write_dataset_csv(ds, os);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "x_1,x_2,x_3,x_4,y_1");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
}
