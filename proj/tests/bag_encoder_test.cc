// Copyright 2026 The dsre Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "dsre/bag_encoder.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/finite_difference.h"

namespace dsre {
namespace {

Eigen::MatrixXd RandomMatrix(int rows, int cols, std::mt19937_64* rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Eigen::MatrixXd::NullaryExpr(rows, cols, [&]() { return n(*rng); });
}

BagEncoderParams RandomParams(int dim, int k, uint64_t seed, double dropout = 0.0) {
  BagEncoderParams p(dim, k, dropout);
  std::mt19937_64 rng(seed);
  p.InitializeRandom(&rng, 0.5);
  p.b_r.FillNormal(0.0, 0.5, &rng);
  return p;
}

TEST(SelectiveAttentionTest, SingleSentence) {
  std::mt19937_64 rng(1);
  BagEncoderParams p = RandomParams(4, 3, 2);
  Eigen::MatrixXd s = RandomMatrix(1, 4, &rng);
  auto [bag, beta] = SelectiveAttention(s, p);
  EXPECT_EQ(beta(0), 1.0);
  EXPECT_TRUE(bag.isApprox(s.row(0).transpose(), 0.0));
}

TEST(SelectiveAttentionTest, ZeroQueryAverages) {
  std::mt19937_64 rng(1);
  BagEncoderParams p = RandomParams(4, 3, 2);
  p.r.value.setZero();
  Eigen::MatrixXd s = RandomMatrix(5, 4, &rng);
  auto [bag, beta] = SelectiveAttention(s, p);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(beta(i), 0.2, 1e-15);
  EXPECT_TRUE(bag.isApprox(s.colwise().mean().transpose(), 1e-14));
}

TEST(SelectiveAttentionTest, MatchesDirectFormula) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    BagEncoderParams p = RandomParams(6, 3, trial);
    Eigen::MatrixXd s = RandomMatrix(3, 6, &rng);
    auto [bag, beta] = SelectiveAttention(s, p);
    std::vector<long double> e(3);
    long double total = 0.0L;
    for (int i = 0; i < 3; ++i) {
      long double dot = 0.0L;
      for (int j = 0; j < 6; ++j) dot += static_cast<long double>(s(i, j)) * p.r.value(0, j);
      e[i] = std::exp(dot);
      total += e[i];
    }
    EXPECT_NEAR(beta.sum(), 1.0, 1e-12);
    for (int j = 0; j < 6; ++j) {
      long double b = 0.0L;
      for (int i = 0; i < 3; ++i) b += e[i] / total * s(i, j);
      EXPECT_NEAR(bag(j), static_cast<double>(b), 1e-12);
    }
  }
}

TEST(SelectiveAttentionTest, PermutationEquivariant) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 6;
    BagEncoderParams p = RandomParams(5, 3, trial);
    Eigen::MatrixXd s = RandomMatrix(n, 5, &rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd permuted(n, 5);
    for (int i = 0; i < n; ++i) permuted.row(i) = s.row(perm[i]);
    auto [bag, beta] = SelectiveAttention(s, p);
    auto [pbag, pbeta] = SelectiveAttention(permuted, p);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(pbeta(i), beta(perm[i]), 1e-14);
    EXPECT_LT((pbag - bag).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ClassifyTest, Examples) {
  BagEncoderParams p(4, 5, 0.0);
  p.w_r.value.setZero();
  p.b_r.value.setZero();
  Eigen::VectorXd bag = Eigen::VectorXd::Constant(4, 3.0);
  Eigen::VectorXd probs = Classify(bag, p);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(probs(k), 0.2, 1e-15);

  p.b_r.value(0, 3) = 50.0;
  probs = Classify(bag, p);
  Eigen::Index argmax;
  probs.maxCoeff(&argmax);
  EXPECT_EQ(argmax, 3);
  EXPECT_NEAR(probs.sum(), 1.0, 1e-12);
}

TEST(ClassifyTest, MatchesOracleSoftmax) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    BagEncoderParams p = RandomParams(6, 4, trial);
    Eigen::VectorXd bag = RandomMatrix(6, 1, &rng);
    Eigen::VectorXd probs = Classify(bag, p);
    std::vector<long double> e(4);
    long double total = 0.0L;
    for (int k = 0; k < 4; ++k) {
      long double z = p.b_r.value(0, k);
      for (int j = 0; j < 6; ++j) z += static_cast<long double>(p.w_r.value(k, j)) * bag(j);
      e[k] = std::exp(z);
      total += e[k];
    }
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(probs(k), static_cast<double>(e[k] / total), 1e-12);
  }
}

TEST(ForwardBagTest, DropoutOnlyInTraining) {
  std::mt19937_64 rng(6);
  BagEncoderParams p = RandomParams(8, 3, 1, 0.4);
  Eigen::MatrixXd s = RandomMatrix(3, 8, &rng);
  BagForward eval = ForwardBag(s, p).value();
  EXPECT_EQ(eval.dropout_scale.size(), 0);
  EXPECT_TRUE(eval.probs.isApprox(Classify(eval.bag, p), 1e-14));
  std::mt19937_64 drop(1);
  BagForward train = ForwardBag(s, p, &drop).value();
  ASSERT_EQ(train.dropout_scale.size(), 8);
  for (int j = 0; j < 8; ++j) {
    EXPECT_TRUE(train.dropout_scale(j) == 0.0 ||
                std::abs(train.dropout_scale(j) - 1.0 / 0.6) < 1e-15);
  }
  EXPECT_TRUE(train.classifier_input.isApprox(
      train.bag.cwiseProduct(train.dropout_scale), 1e-15));
}

TEST(ForwardBagTest, EmptyBagFails) {
  BagEncoderParams p = RandomParams(4, 3, 1);
  EXPECT_FALSE(ForwardBag(Eigen::MatrixXd(0, 4), p).ok());
  EXPECT_FALSE(ForwardBag(Eigen::MatrixXd::Zero(2, 5), p).ok());
}

TEST(BagLossTest, Examples) {
  Eigen::VectorXd perfect = Eigen::VectorXd::Constant(3, -1e300);
  perfect(1) = 0.0;
  EXPECT_EQ(BagLoss({perfect}, {1}, {1.0, 1.0, 1.0}), 0.0);

  const int k = 7;
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(k, -std::log(k));
  EXPECT_NEAR(BagLoss({uniform, uniform}, {0, 4}, std::vector<double>(k, 1.0)),
              std::log(7.0), 1e-12);

  // p = [0.5, 0.5] gold 0 (weight 2), p = [0.2, 0.8] gold 1 (weight 1).
  Eigen::VectorXd a(2), b(2);
  a << std::log(0.5), std::log(0.5);
  b << std::log(0.2), std::log(0.8);
  const double expected = -(2.0 * std::log(0.5) + 1.0 * std::log(0.8)) / 2.0;
  EXPECT_NEAR(BagLoss({a, b}, {0, 1}, {2.0, 1.0}), expected, 1e-9);
}

TEST(BackwardBagTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  BagEncoderParams p = RandomParams(5, 4, 3, 0.3);
  Eigen::MatrixXd s = RandomMatrix(3, 5, &rng);
  const int gold = 2;
  const double coef = 0.7;
  // A fixed dropout mask: the forward pass replays the same generator state.
  auto loss = [&]() {
    std::mt19937_64 drop(99);
    BagForward f = ForwardBag(s, p, &drop).value();
    return -coef * f.log_probs(gold);
  };
  ZeroGrads(p.Parameters());
  std::mt19937_64 drop(99);
  BagForward f = ForwardBag(s, p, &drop).value();
  Eigen::MatrixXd d_s = BackwardBag(f, gold, coef, p);
  testing::GradientCheckResult r = testing::CheckGradients(p.Parameters(), loss, 1e-6);
  EXPECT_TRUE(r.failures.empty()) << r.failures.front().where;
  EXPECT_GT(r.checked, 0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double saved = s(i, j);
      s(i, j) = saved + 1e-6;
      const double plus = loss();
      s(i, j) = saved - 1e-6;
      const double minus = loss();
      s(i, j) = saved;
      EXPECT_LT(testing::RelativeError(d_s(i, j), (plus - minus) / 2e-6, 1e-7), 1e-6);
    }
  }
}

}  // namespace
}  // namespace dsre
