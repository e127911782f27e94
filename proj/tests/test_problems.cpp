#include <gtest/gtest.h>

#include <cmath>

#include "fuvalkit/problems.hpp"

using namespace fuvalkit;

namespace {

Problem single(LossKind kind, double label, std::vector<std::pair<std::size_t, double>> features, std::size_t dim) {
  return Problem::from_examples({SparseExample{label, std::move(features), dim}}, kind);
}

}  // namespace

TEST(LossValue, LogisticAtOrigin) {
  const Problem p = single(LossKind::Logistic, 1.0, {{1, 1.0}}, 2);
  EXPECT_NEAR(loss_value(p, 0, Vector{0.0, 0.0}), std::log(2.0), 1e-15);
}

TEST(LossValue, LeastSquaresAtOrigin) {
  const Problem p = single(LossKind::LeastSquares, 1.0, {{1, 1.0}}, 1);
  EXPECT_DOUBLE_EQ(loss_value(p, 0, Vector{0.0}), 0.5);
}

TEST(LossValue, LogisticVanishesForLargeMargin) {
  const Problem p = single(LossKind::Logistic, 1.0, {{1, 1.0}}, 2);
  EXPECT_LT(loss_value(p, 0, Vector{50.0, 0.0}), 1e-20);
  EXPECT_TRUE(std::isfinite(loss_value(p, 0, Vector{-1e4, 0.0})));
}

TEST(LossGrad, Examples) {
  const Problem lg = single(LossKind::Logistic, 1.0, {{1, 1.0}}, 2);
  const Vector g = loss_grad(lg, 0, Vector{0.0, 0.0});
  EXPECT_DOUBLE_EQ(g[0], -0.5);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
  const Problem ls = single(LossKind::LeastSquares, 1.0, {{1, 1.0}}, 1);
  EXPECT_DOUBLE_EQ(loss_grad(ls, 0, Vector{0.0})[0], -1.0);
}

TEST(LossValue, DimensionMismatchThrows) {
  const Problem p = single(LossKind::LeastSquares, 1.0, {{1, 1.0}}, 1);
  EXPECT_THROW(loss_value(p, 0, Vector{0.0, 0.0}), ContractError);
}

TEST(Objective, MeanOfSamples) {
  const Problem p = Problem::from_examples(
      {SparseExample{0.0, {{1, 1.0}}, 1}, SparseExample{std::sqrt(2.0), {{1, 1.0}}, 1}}, LossKind::LeastSquares);
  EXPECT_NEAR(objective(p, Vector{0.0}), 0.5, 1e-15);
}

TEST(SampleConstants, Examples) {
  const Problem lg = single(LossKind::Logistic, 1.0, {{1, 3.0}, {2, 4.0}}, 2);
  const SampleConstants c = sample_constants(lg);
  EXPECT_DOUBLE_EQ(c.lipschitz[0], 5.0);
  EXPECT_DOUBLE_EQ(c.smoothness[0], 6.25);
  EXPECT_DOUBLE_EQ(c.inf_fi[0], 0.0);

  const Problem ls = single(LossKind::LeastSquares, 1.0, {{1, 2.0}}, 1);
  const SampleConstants d = sample_constants(ls);
  EXPECT_DOUBLE_EQ(d.smoothness[0], 4.0);
  EXPECT_FALSE(d.lipschitz_available);

  const Problem empty = single(LossKind::Logistic, 1.0, {}, 2);
  const SampleConstants e = sample_constants(empty);
  EXPECT_DOUBLE_EQ(e.lipschitz[0], 0.0);
  EXPECT_DOUBLE_EQ(e.smoothness[0], 0.0);
}

TEST(Problem, RejectsBadExamples) {
  EXPECT_THROW(single(LossKind::Logistic, 1.0, {{2, 1.0}, {1, 1.0}}, 2), ContractError);
  EXPECT_THROW(single(LossKind::Logistic, 1.0, {{3, 1.0}}, 2), ContractError);
  EXPECT_THROW(single(LossKind::Logistic, 1.0, {{1, NAN}}, 2), ContractError);
  EXPECT_THROW(Problem::from_examples({}, LossKind::Logistic), ContractError);
}

TEST(Problem, ScaledMultipliesEveryLoss) {
  const Problem p = single(LossKind::Logistic, -1.0, {{1, 0.3}, {2, -2.0}}, 2);
  const Problem q = p.scaled(7.0);
  const Vector w{0.4, 0.1};
  EXPECT_NEAR(loss_value(q, 0, w), 7.0 * loss_value(p, 0, w), 1e-14);
  EXPECT_NE(p.hash(), q.hash());
}

TEST(Numerics, StableLogistic) {
  EXPECT_DOUBLE_EQ(log1p_exp(1000.0), 1000.0);
  EXPECT_DOUBLE_EQ(log1p_exp(-1000.0), 0.0);
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_DOUBLE_EQ(sigmoid(-1000.0), 0.0);
}
