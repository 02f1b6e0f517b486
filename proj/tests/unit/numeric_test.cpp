#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "guesswork/numeric.hpp"

using namespace guesswork;

TEST(CompensatedSum, RecoversSmallTermsLostByNaiveSummation) {
  CompensatedSum s;
  for (double x : {1.0, 1e100, 1.0, -1e100}) s += x;
  EXPECT_EQ(s.value(), 2.0);
}

TEST(CompensatedSum, SpanOverloadMatches) {
  std::vector<double> xs(1000, 0.1);
  EXPECT_NEAR(compensated_sum(xs), 100.0, 1e-13);
}

TEST(LogSumExp, AddsProbabilitiesInLogSpace) {
  std::vector<double> xs{std::log(0.2), std::log(0.3)};
  EXPECT_NEAR(log_sum_exp(xs), std::log(0.5), 1e-15);
}

TEST(LogSumExp, IgnoresNegativeInfinity) {
  std::vector<double> xs{-kInf, std::log(0.25), -kInf};
  EXPECT_NEAR(log_sum_exp(xs), std::log(0.25), 1e-15);
  std::vector<double> none{-kInf};
  EXPECT_EQ(log_sum_exp(none), -kInf);
  EXPECT_EQ(log_sum_exp(std::vector<double>{}), -kInf);
}

TEST(LogSumExp, StableForHugeArguments) {
  std::vector<double> xs{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(xs), 1000.0 + std::log(2.0), 1e-12);
}

TEST(Seeds, DeriveSeedIsDeterministicAndSpreads) {
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(42, i));
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_NE(derive_seed(1, 0), derive_seed(0, 1));
}

TEST(SplitMix64, MatchesReferenceSequence) {
  SplitMix64 g(0);
  EXPECT_EQ(g(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(g(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(g(), 0x06c45d188009454fULL);
}
