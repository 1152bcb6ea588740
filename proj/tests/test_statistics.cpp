#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "moralnet/statistics.hpp"
#include "test_support.hpp"

using namespace moralnet;

TEST(Spearman, PerfectAndReversed) {
  std::vector<double> x{1, 2, 3};
  std::vector<double> rev{3, 2, 1};
  EXPECT_DOUBLE_EQ(stats::spearman(x, x).rho, 1.0);
  EXPECT_DOUBLE_EQ(stats::spearman(x, x).p, 0.0);
  EXPECT_DOUBLE_EQ(stats::spearman(x, rev).rho, -1.0);
}

TEST(Spearman, HandRankedFivePoints) {
  // d = (0, -1, 1, -1, 1), sum d^2 = 4, rho = 1 - 6*4/(5*24) = 0.8.
  auto c = stats::spearman(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{1, 3, 2, 5, 4});
  EXPECT_NEAR(c.rho, 0.8, 1e-15);
  // t = 0.8 sqrt(3 / 0.36) = 2.3094; two-sided p with 3 df.
  EXPECT_NEAR(c.p, 0.104088, 1e-5);
}

TEST(Spearman, TiesUseAverageRanks) {
  auto r = stats::average_ranks(std::vector<double>{10, 20, 20, 30});
  EXPECT_EQ(r, (std::vector<double>{1, 2.5, 2.5, 4}));
}

TEST(Spearman, ZeroVarianceIsUndefined) {
  auto c = stats::spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3});
  EXPECT_FALSE(c.defined());
  EXPECT_TRUE(std::isnan(c.p));
}

TEST(Spearman, PreconditionViolations) {
  EXPECT_THROW(stats::spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ValidationError);
  EXPECT_THROW(stats::spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), ValidationError);
}

TEST(Spearman, MatchesNaiveAndIsMonotoneInvariant) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng() % 98;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = static_cast<double>(rng() % 20);
    for (auto& v : y) v = static_cast<double>(rng() % 20);
    auto c = stats::spearman(x, y);
    const double naive = moralnet::testing::naive_spearman(x, y);
    if (std::isnan(naive)) {
      EXPECT_FALSE(c.defined());
      continue;
    }
    EXPECT_NEAR(c.rho, naive, 1e-12);
    std::vector<double> tx(n);
    for (std::size_t i = 0; i < n; ++i) tx[i] = std::exp(0.3 * x[i]) - 7;
    EXPECT_NEAR(stats::spearman(tx, y).rho, c.rho, 1e-12);
  }
}

TEST(Median, OddEvenEmpty) {
  EXPECT_EQ(stats::median({3, 1, 2}), 2.0);
  EXPECT_EQ(stats::median({4, 1, 3, 2}), 2.5);
  EXPECT_TRUE(std::isnan(stats::median({})));
}

TEST(MadNormalize, HandComputed) {
  auto r = stats::mad_normalize(std::vector<double>{1, 2, 3, 4, 100});
  EXPECT_EQ(r.median, 3.0);
  EXPECT_EQ(r.mad, 1.0);
  EXPECT_EQ(r.values, (std::vector<double>{-2, -1, 0, 1, 97}));
  EXPECT_FALSE(r.degenerate);
  EXPECT_EQ(stats::mad_normalize(std::vector<double>{-1, 0, 1}).values, (std::vector<double>{-1, 0, 1}));
}

TEST(MadNormalize, ConstantInputIsDegenerate) {
  auto r = stats::mad_normalize(std::vector<double>{5, 5, 5, 5});
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.values, (std::vector<double>{0, 0, 0, 0}));
  EXPECT_THROW(stats::mad_normalize(std::vector<double>{1}), ValidationError);
}

TEST(MadNormalize, PreservesOrder) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(2 + rng() % 50);
    for (auto& v : x) v = nd(rng);
    auto r = stats::mad_normalize(x);
    if (r.degenerate) continue;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < x.size(); ++j)
        if (x[i] < x[j]) {
          EXPECT_LT(r.values[i], r.values[j]);
        }
  }
}

TEST(WelchTTest, FlagsPlantedDifference) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> a(5.0, 0.5), b(4.0, 0.5);
  std::vector<double> xa(40), xb(40);
  for (auto& v : xa) v = a(rng);
  for (auto& v : xb) v = b(rng);
  auto t = stats::welch_t_test(xa, xb);
  EXPECT_TRUE(t.significant);
  EXPECT_LT(t.p, 1e-6);
  EXPECT_GT(t.t, 0);
  auto same = stats::welch_t_test(xa, xa);
  EXPECT_FALSE(same.significant);
}

TEST(WelchTTest, KnownValue) {
  // a: mean 2, var 1 (n=3); b: mean 5, var 1 (n=3): t = -3/sqrt(2/3), df = 4.
  auto t = stats::welch_t_test(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6});
  EXPECT_NEAR(t.t, -3.0 / std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(t.df, 4.0, 1e-12);
  EXPECT_NEAR(t.p, 0.0213116, 1e-6);
}
