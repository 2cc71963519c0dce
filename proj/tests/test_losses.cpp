#include "sga/errors.hpp"
#include "sga/losses.hpp"
#include "grad_check.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sga;

TEST(InfoNce, SingletonIsZero) {
  const std::vector<std::pair<int, int>> pos{{0, 0}};
  const auto r = info_nce(Eigen::MatrixXd::Constant(1, 1, 0.3), pos);
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.grad(0, 0), 0.0);
}

TEST(InfoNce, SaturatesMonotonically) {
  const std::vector<std::pair<int, int>> pos{{0, 0}, {1, 1}, {2, 2}};
  const Eigen::MatrixXd base = 2.0 * Eigen::MatrixXd::Identity(3, 3) - Eigen::MatrixXd::Ones(3, 3);
  double prev = info_nce(0.01 * base, pos, 0.07).loss;
  for (double alpha = 0.05; alpha < 3.0; alpha *= 1.5) {
    const double l = info_nce(alpha * base, pos, 0.07).loss;
    // Strict until the loss underflows to exactly zero.
    if (prev > 0.0) EXPECT_LT(l, prev);
    EXPECT_LE(l, prev);
    EXPECT_GE(l, 0.0);
    prev = l;
  }
  EXPECT_LT(prev, 1e-15);
}

TEST(InfoNce, HandComputed2x2) {
  // logits [[1,0],[0,1]] at T = 1, diagonal positives: each row and column
  // cross-entropy is log(1 + e^-1).
  const std::vector<std::pair<int, int>> pos{{0, 0}, {1, 1}};
  const auto r = info_nce(Eigen::MatrixXd::Identity(2, 2), pos, 1.0);
  EXPECT_NEAR(r.loss, std::log1p(std::exp(-1.0)), 1e-15);
}

TEST(InfoNce, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) EXPECT_LT(test::info_nce_grad_error(rng), 1e-6);
}

TEST(InfoNce, Diagonal5x5FiniteDifferences) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd S = test::random_matrix(rng, 5, 5);
  const std::vector<std::pair<int, int>> pos{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  EXPECT_LT(test::info_nce_fd_error(S, pos, 0.07), 1e-6);
}

TEST(InfoNce, GradientMassConservation) {
  // Each row term sums to zero along its row and each column term along its
  // column, so the total vanishes; entries outside positive rows and
  // columns get no gradient.
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd S = test::random_matrix(rng, 4, 6);
    const std::vector<std::pair<int, int>> pos{{trial % 4, trial % 6},
                                               {(trial + 1) % 4, 5 - trial % 6}};
    const auto r = info_nce(S, pos, 0.1);
    EXPECT_NEAR(r.grad.sum(), 0.0, 1e-10);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 6; ++j) {
        const bool touched = i == pos[0].first || i == pos[1].first || j == pos[0].second ||
                             j == pos[1].second;
        if (!touched) EXPECT_EQ(r.grad(i, j), 0.0);
      }
    }
  }
}

TEST(InfoNce, Errors) {
  EXPECT_THROW(info_nce(Eigen::MatrixXd::Zero(2, 2), {}), InvalidInput);
  const std::vector<std::pair<int, int>> dup{{0, 0}, {1, 0}};
  EXPECT_THROW(info_nce(Eigen::MatrixXd::Zero(2, 2), dup), InvalidInput);
  const std::vector<std::pair<int, int>> out{{0, 2}};
  EXPECT_THROW(info_nce(Eigen::MatrixXd::Zero(2, 2), out), InvalidInput);
  const std::vector<std::pair<int, int>> ok{{0, 0}};
  EXPECT_THROW(info_nce(Eigen::MatrixXd::Zero(2, 2), ok, 0.0), InvalidParameter);
}

TEST(Triplet, Examples) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd far(3);
  far << 2.0, 0.0, 0.0;
  const auto inactive = triplet_loss(a, a, far);
  EXPECT_EQ(inactive.loss, 0.0);
  EXPECT_TRUE(inactive.grad_anchor.isZero());

  Eigen::VectorXd p(3), n(3);
  p << 1.0, 0.0, 0.0;
  n << 0.0, 0.2, 0.0;
  EXPECT_NEAR(triplet_loss(a, p, n, 0.5).loss, 1.3, 1e-15);
}

TEST(Triplet, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) EXPECT_LT(test::triplet_grad_error(rng), 1e-6);
}

TEST(Triplet, LipschitzInEachArgument) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd a(4), p(4), q(4), e(4);
    for (int k = 0; k < 4; ++k) {
      a[k] = n(rng);
      p[k] = n(rng);
      q[k] = n(rng);
      e[k] = 0.1 * n(rng);
    }
    const double l0 = triplet_loss(a, p, q).loss;
    EXPECT_GE(l0, 0.0);
    EXPECT_LE(std::abs(triplet_loss(a, p + e, q).loss - l0), e.norm() + 1e-12);
    EXPECT_LE(std::abs(triplet_loss(a, p, q + e).loss - l0), e.norm() + 1e-12);
    // The anchor enters both distances.
    EXPECT_LE(std::abs(triplet_loss(a + e, p, q).loss - l0), 2.0 * e.norm() + 1e-12);
  }
}

TEST(HardNegative, Examples) {
  std::vector<Eigen::VectorXd> pool{Eigen::Vector2d(1, 0), Eigen::Vector2d(5, 5)};
  const Eigen::VectorXd anchor = Eigen::Vector2d(1, 0);
  EXPECT_EQ(hard_negative_mine(anchor, 0, pool), 1u);
  pool.push_back(anchor);
  EXPECT_EQ(hard_negative_mine(anchor, 0, pool), 2u);
  std::vector<Eigen::VectorXd> only{anchor};
  EXPECT_THROW(hard_negative_mine(anchor, 0, only), InvalidInput);
}

TEST(HardNegative, ExhaustiveOracle) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> level(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    // Integer lattice points give frequent distance ties.
    std::vector<Eigen::VectorXd> pool(16, Eigen::VectorXd(3));
    for (auto& v : pool) {
      for (int k = 0; k < 3; ++k) v[k] = level(rng);
    }
    Eigen::VectorXd anchor(3);
    for (int k = 0; k < 3; ++k) anchor[k] = level(rng);
    const std::size_t positive = static_cast<std::size_t>(trial % 16);
    std::size_t best = 99;
    double best_d = 1e300;
    for (std::size_t k = 0; k < 16; ++k) {
      if (k == positive) continue;
      const double d = (anchor - pool[k]).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    EXPECT_EQ(hard_negative_mine(anchor, positive, pool), best);
  }
}

TEST(ToyFit, DecreasesAndIsDeterministic) {
  const std::vector<std::pair<int, int>> pos{{0, 2}, {1, 0}, {2, 1}, {3, 4}, {4, 3}, {5, 5}};
  ToyFitParams p;
  p.seed = 11;
  const auto losses = toy_embedding_fit(6, 6, pos, p);
  ASSERT_EQ(losses.size(), 201u);
  EXPECT_LT(losses.back(), losses.front());
  // Mean over consecutive windows of 10 steps decreases.
  double prev = 1e300;
  for (std::size_t w = 0; w + 10 <= losses.size(); w += 10) {
    double m = 0.0;
    for (std::size_t k = w; k < w + 10; ++k) m += losses[k];
    EXPECT_LT(m, prev);
    prev = m;
  }
  EXPECT_EQ(toy_embedding_fit(6, 6, pos, p), losses);
}

TEST(ToyFit, ZeroLearningRateIsConstant) {
  const std::vector<std::pair<int, int>> pos{{0, 0}, {1, 1}};
  ToyFitParams p;
  p.lr = 0.0;
  p.steps = 20;
  const auto losses = toy_embedding_fit(3, 3, pos, p);
  for (double l : losses) EXPECT_EQ(l, losses.front());
}
