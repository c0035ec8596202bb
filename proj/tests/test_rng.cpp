#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pansim/rng.hpp"

using namespace pansim;

TEST(Rng, SameSeedSameStream) {
  SeededRng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs |= x != c.next_u64();
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(a, b);
}

TEST(Rng, UniformInUnitInterval) {
  SeededRng r(1);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Rng, BelowIsUnbiasedEnough) {
  SeededRng r(2);
  std::vector<int> hist(7);
  for (int i = 0; i < 70000; ++i) {
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    ++hist[k];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 400);
}

TEST(Rng, GeometricMeanMatches) {
  SeededRng r(3);
  const double p = 0.2;
  double sum = 0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(r.geometric(p));
  EXPECT_NEAR(sum / n, (1 - p) / p, 0.1);
  EXPECT_EQ(r.geometric(1.0), 0u);
  EXPECT_EQ(r.geometric(0.0), UINT64_MAX);
}

TEST(Rng, TriangularStaysInSupportWithRightMean) {
  SeededRng r(4);
  double sum = 0;
  for (int i = 0; i < 50000; ++i) {
    const double x = r.triangular(1.9, 2.9, 3.9);
    ASSERT_GE(x, 1.9);
    ASSERT_LE(x, 3.9);
    sum += x;
  }
  EXPECT_NEAR(sum / 50000, 2.9, 0.01);
}

TEST(Rng, NormalMoments) {
  SeededRng r(5);
  double s = 0, s2 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal(3.0, 2.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 3.0, 0.03);
  EXPECT_NEAR(std::sqrt(s2 / n - mean * mean), 2.0, 0.03);
}

TEST(Rng, StochasticRoundKeepsExpectation) {
  SeededRng r(6);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const int k = r.stochastic_round(2.25);
    ASSERT_TRUE(k == 2 || k == 3);
    sum += k;
  }
  EXPECT_NEAR(sum / 20000, 2.25, 0.02);
}

TEST(Rng, ShuffleIsAPermutation) {
  SeededRng r(7);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  r.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sorted[i], i);
}
