#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "guesswork/errors.hpp"
#include "guesswork/guesswork.hpp"
#include "guesswork/oracle.hpp"

using namespace guesswork;

TEST(Exhaustive, SmallBernoulliCases) {
  const Pmf p = Pmf::bernoulli(0.2);
  EXPECT_NEAR(exhaustive_guesswork(p, 1, 1.0).value, 1.2, 1e-15);
  // 0.64*1 + 0.16*2 + 0.16*3 + 0.04*4
  const auto r = exhaustive_guesswork(p, 2, 1.0);
  EXPECT_NEAR(r.value, 1.6, 1e-15);
  EXPECT_EQ(r.work, 4u);
  EXPECT_EQ(r.method, OracleMethod::kExhaustiveEnumeration);
}

TEST(Exhaustive, MatchesProductMoment) {
  const Pmf p = Pmf::indexed({0.5, 0.3, 0.2});
  for (std::size_t n = 1; n <= 4; ++n) {
    EXPECT_NEAR(exhaustive_guesswork(p, n, 1.5).value, exact_guesswork_moment(product_pmf(p, n), 1.5).value, 1e-10);
  }
  EXPECT_THROW(exhaustive_guesswork(Pmf::uniform(10), 8, 1.0), DomainError);
}

TEST(Grid, FindsQuadraticMinimum) {
  const auto r = simplex_grid_min([](std::span<const double> q) { return (q[0] - 0.3) * (q[0] - 0.3); }, 2, 1e-6);
  ASSERT_EQ(r.argmin.size(), 2u);
  EXPECT_NEAR(r.argmin[0], 0.3, 1e-6);
  EXPECT_NEAR(r.argmin[1], 0.7, 1e-6);
  EXPECT_EQ(r.method, OracleMethod::kGridMinimization);
  const auto t = simplex_grid_min(
      [](std::span<const double> q) { return std::pow(q[0] - 0.2, 2) + std::pow(q[1] - 0.5, 2); }, 3, 1e-3);
  EXPECT_NEAR(t.argmin[0], 0.2, 1e-3);
  EXPECT_NEAR(t.argmin[1], 0.5, 1e-3);
}

TEST(Grid, InfeasibleEverywhereIsInfinite) {
  const auto r = simplex_grid_min([](std::span<const double>) { return std::numeric_limits<double>::infinity(); }, 2, 1e-6);
  EXPECT_TRUE(std::isinf(r.value));
}

TEST(Grid, RejectsCoarseSteps) {
  auto f = [](std::span<const double>) { return 0.0; };
  EXPECT_THROW(simplex_grid_min(f, 2, 1e-3), DomainError);
  EXPECT_THROW(simplex_grid_min(f, 3, 1e-2), DomainError);
  EXPECT_THROW(simplex_grid_min(f, 4, 1e-3), DomainError);
}

TEST(Interleaving, WorstFirstHit) {
  EXPECT_EQ(interleaving_search({{5, 1}, {1}}, 1).value, 2.0);
  EXPECT_EQ(interleaving_search({{5, 1}, {1}}, 5).value, 2.0);
  EXPECT_EQ(interleaving_search({{1, 2, 3}, {4, 5}}, 3).value, 5.0);
  EXPECT_EQ(interleaving_search({{1, 2, 3}, {3, 5}}, 3).value, 3.0);
  EXPECT_TRUE(std::isinf(interleaving_search({{1, 2}, {3}}, 9).value));
}

TEST(Interleaving, EnforcesCap) {
  std::vector<std::vector<std::uint64_t>> big(2, std::vector<std::uint64_t>(7, 0));
  EXPECT_THROW(interleaving_search(big, 0), DomainError);
}

TEST(Series, GeometricMoments) {
  const auto r = truncated_series_moment(0.5, 2.0);
  EXPECT_NEAR(r.value, 6.0, 1e-10);
  EXPECT_EQ(r.method, OracleMethod::kTruncatedSeries);
  EXPECT_NEAR(truncated_series_moment(0.1, 1.0).value, 10.0, 1e-9);
  EXPECT_THROW(truncated_series_moment(0.0, 1.0), DomainError);
}
