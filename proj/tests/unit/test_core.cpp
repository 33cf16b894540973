#include <gtest/gtest.h>

#include <cmath>

#include "overparam/core/numerics.hpp"
#include "overparam/core/rng.hpp"

using namespace overparam;

namespace {
Matrix random_matrix(RngStream& rng) {
  const Index rows = 1 + static_cast<Index>(rng.below(12));
  const Index cols = 1 + static_cast<Index>(rng.below(6));
  Matrix w = sample_gaussian_matrix(rows, cols, 1.0, rng);
  // Make some rows much larger than others.
  for (Index i = 0; i < rows; ++i) w.row(i) *= std::exp(2.0 * rng.normal());
  return w;
}
}  // namespace

TEST(RowNorm, Examples) {
  Matrix a(2, 2);
  a << 3, 4, 0, 0;
  EXPECT_DOUBLE_EQ(row_lp_norm(a, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(row_lp_norm(a, kInf), 5.0);
  Matrix id = Matrix::Identity(2, 2);
  EXPECT_NEAR(row_lp_norm(id, 4.0), std::pow(2.0, 0.25), 1e-15);
}

TEST(RowNorm, RejectsSmallP) {
  Matrix a = Matrix::Ones(2, 2);
  EXPECT_THROW(row_lp_norm(a, 0.5), InvalidParameter);
  EXPECT_THROW(row_lp_norm(a, std::nan("")), InvalidParameter);
}

TEST(RowNorm, FrobeniusAtTwo) {
  RngStream rng(11);
  for (int t = 0; t < 200; ++t) {
    Matrix w = random_matrix(rng);
    EXPECT_NEAR(row_lp_norm(w, 2.0), w.norm(), 1e-12 * w.norm());
  }
}

TEST(RowNorm, MonotoneInP) {
  RngStream rng(12);
  const double ps[] = {1.0, 1.5, 2.0, 3.0, 4.0, 8.0, kInf};
  for (int t = 0; t < 300; ++t) {
    Matrix w = random_matrix(rng);
    for (std::size_t i = 0; i + 1 < std::size(ps); ++i)
      EXPECT_LE(row_lp_norm(w, ps[i + 1]), row_lp_norm(w, ps[i]) * (1 + 1e-12));
  }
}

TEST(RowNorm, CauchySchwarzChain) {
  RngStream rng(13);
  for (int t = 0; t < 300; ++t) {
    Matrix w = random_matrix(rng);
    const double f = row_lp_norm(w, 2.0), q = row_lp_norm(w, 4.0);
    const double m = static_cast<double>(w.rows());
    EXPECT_GE(f * (1 + 1e-12), q);
    EXPECT_GE(q * (1 + 1e-12), std::pow(m, -0.25) * f);
    EXPECT_NEAR(row_l4_pow4(w), std::pow(q, 4), 1e-9 * std::pow(q, 4));
  }
}

TEST(Relu, Values) {
  EXPECT_EQ(relu(-2.0), 0.0);
  EXPECT_EQ(relu(3.0), 3.0);
  EXPECT_EQ(relu_grad(0.0), 1.0);
  EXPECT_EQ(relu_grad(-1e-300), 0.0);
  EXPECT_EQ(relu_grad(2.0), 1.0);
}

TEST(Relu, OddPartIsIdentity) {
  RngStream rng(14);
  for (int t = 0; t < 1000; ++t) {
    const double x = rng.normal(10.0);
    EXPECT_EQ(relu(x) - relu(-x), x);
  }
}

TEST(Sampling, ZeroVarianceIsZero) {
  RngStream rng(1);
  EXPECT_TRUE(sample_gaussian_matrix(3, 4, 0.0, rng).isZero(0.0));
}

TEST(Sampling, NegativeVarianceThrows) {
  RngStream rng(1);
  EXPECT_THROW(sample_gaussian_matrix(3, 4, -1.0, rng), InvalidParameter);
}

TEST(Sampling, GaussianMoments) {
  RngStream rng(2);
  const Matrix g = sample_gaussian_matrix(1000, 1000, 1.0, rng);
  EXPECT_NEAR(g.mean(), 0.0, 0.005);
  RngStream rng2(3);
  const Matrix h = sample_gaussian_matrix(1000, 1000, 0.01, rng2);
  const double var = (h.array() - h.mean()).square().sum() / (h.size() - 1);
  EXPECT_NEAR(var, 0.01, 0.0002);
}

TEST(Sampling, Reproducible) {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  const Matrix x = sample_gaussian_matrix(5, 5, 1.0, a);
  const Matrix y = sample_gaussian_matrix(5, 5, 1.0, b);
  const Matrix z = sample_gaussian_matrix(5, 5, 1.0, c);
  EXPECT_EQ(x, y);
  EXPECT_NE(x, z);
}

TEST(Sampling, SplitStreamsDiffer) {
  RngStream root(9);
  RngStream s1 = root.split(1), s2 = root.split(2), s1b = root.split(1);
  EXPECT_EQ(s1.normal(), s1b.normal());
  EXPECT_NE(root.split(1).normal(), s2.normal());
}

TEST(Sampling, SignDiagonal) {
  RngStream rng(5);
  const Vector s = sample_sign_diagonal(1000000, rng);
  EXPECT_TRUE(((s.array() == 1.0) || (s.array() == -1.0)).all());
  EXPECT_NEAR(s.mean(), 0.0, 0.005);
  RngStream r1(6), r2(6);
  EXPECT_EQ(sample_sign_diagonal(100, r1), sample_sign_diagonal(100, r2));
  EXPECT_THROW(sample_sign_diagonal(0, r1), InvalidParameter);
}

TEST(Sampling, PermutationIsBijection) {
  RngStream rng(8);
  auto p = random_permutation(1000, rng);
  std::vector<int> seen(1000, 0);
  for (auto i : p) seen[static_cast<std::size_t>(i)]++;
  for (int v : seen) EXPECT_EQ(v, 1);
}
