#include <gtest/gtest.h>

#include <cmath>

#include "pansim/reward.hpp"
#include "pansim/types.hpp"

using namespace pansim;

TEST(Reward, ZeroWhenUnderCapacityAtStageZero) {
  RewardParams p;
  EXPECT_EQ(reward(0, 0, 0, p), 0.0);
  EXPECT_EQ(reward(10, 0, 0, p), 0.0);
}

TEST(Reward, OverCapacityAtStageFour) {
  RewardParams p;
  EXPECT_NEAR(reward(20, 4, 4, p), -0.5, 1e-12);
}

TEST(Reward, StageTwoEconomicTerm) {
  RewardParams p;
  EXPECT_NEAR(reward(0, 2, 2, p), -0.1 * std::pow(2.0, 1.5) / std::pow(4.0, 1.5), 1e-12);
  EXPECT_NEAR(reward(0, 2, 2, p), -0.0353553390593274, 1e-12);
}

TEST(Reward, ShapingOnChange) {
  RewardParams p;
  auto t = reward_terms(0, 1, 0, p);
  EXPECT_EQ(t.health, 0.0);
  EXPECT_NEAR(t.shaping, -0.02, 1e-15);
  EXPECT_NEAR(t.economic, -0.1 / 8.0, 1e-15);
}

TEST(Reward, HealthGateAndBounds) {
  RewardParams p;
  const int population = 1000;
  const double lower = p.a * (population - p.c_max) / p.c_max + p.b + 2 * p.shaping * p.max_stage;
  for (int n = 0; n <= population; n += 7) {
    for (int s = 0; s <= 4; ++s) {
      for (int prev = 0; prev <= 4; ++prev) {
        auto t = reward_terms(n, s, prev, p);
        if (n <= p.c_max) { ASSERT_EQ(t.health, 0.0); }
        ASSERT_LE(t.total(), 0.0);
        ASSERT_GE(t.total(), lower);
      }
    }
  }
}

TEST(Reward, EconomicTermStrictlyIncreasingInStage) {
  RewardParams p;
  for (int s = 1; s <= 4; ++s)
    EXPECT_LT(reward_terms(0, s, s, p).economic, reward_terms(0, s - 1, s - 1, p).economic);
}

TEST(Reward, Validation) {
  RewardParams p;
  EXPECT_NO_THROW(p.validate());
  p.c_max = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = RewardParams{};
  p.p = 0;
  EXPECT_THROW(p.validate(), ConfigError);
}
