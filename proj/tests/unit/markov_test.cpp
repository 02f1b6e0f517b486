#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "guesswork/errors.hpp"
#include "guesswork/guesswork.hpp"
#include "guesswork/markov.hpp"
#include "test_support.hpp"

using namespace guesswork;

namespace {

MarkovModel two_state() {
  return MarkovModel({"a", "b"}, SquareMatrix::from_rows({{0.8, 0.2}, {0.4, 0.6}}));
}

// log sum over all length-n sequences of P(x^n)^theta, enumerated directly.
double log_power_sum(const MarkovModel& m, std::size_t n, double theta) {
  const std::size_t k = m.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k;
  std::vector<std::size_t> seq(n);
  long double sum = 0;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = n; i-- > 0;) {
      seq[i] = c % k;
      c /= k;
    }
    sum += std::pow(static_cast<long double>(m.sequence_probability(seq)), static_cast<long double>(theta));
  }
  return std::log(static_cast<double>(sum));
}

}  // namespace

TEST(Perron, SatisfiesEigenEquations) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 5;
    SquareMatrix w(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w(i, j) = u(rng);
    const PerronData d = perron(w);
    double lr = 0, lsum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double wr = 0, lw = 0;
      for (std::size_t j = 0; j < n; ++j) {
        wr += w(i, j) * d.right[j];
        lw += d.left[j] * w(j, i);
      }
      EXPECT_NEAR(wr, d.lambda * d.right[i], 1e-10 * d.lambda);
      EXPECT_NEAR(lw, d.lambda * d.left[i], 1e-10 * d.lambda);
      EXPECT_GT(d.right[i], 0.0);
      lr += d.left[i] * d.right[i];
      lsum += d.left[i];
    }
    EXPECT_NEAR(lr, 1.0, 1e-12);
    EXPECT_NEAR(lsum, 1.0, 1e-12);
  }
}

TEST(Perron, PeriodicAndReducibleMatrices) {
  const PerronData d = perron(SquareMatrix::from_rows({{0, 2}, {2, 0}}));
  EXPECT_NEAR(d.lambda, 2.0, 1e-12);
  EXPECT_THROW(perron(SquareMatrix::from_rows({{1, 0}, {0.5, 0.5}})), DomainError);
  EXPECT_THROW(perron(SquareMatrix::identity(3, 2.0)), DomainError);
  EXPECT_NEAR(perron(SquareMatrix::identity(1, 2.5)).lambda, 2.5, 1e-15);
  EXPECT_FALSE(is_irreducible(SquareMatrix::from_rows({{1, 1}, {0, 1}})));
  EXPECT_TRUE(is_irreducible(SquareMatrix::from_rows({{0, 1}, {1, 0}})));
}

TEST(Markov, ModelValidation) {
  EXPECT_THROW(MarkovModel({"a", "b"}, SquareMatrix::from_rows({{0.5, 0.6}, {0.5, 0.5}})), DomainError);
  EXPECT_THROW(MarkovModel({"a", "b"}, SquareMatrix::from_rows({{1, 0}, {0.5, 0.5}})), DomainError);
  EXPECT_THROW(MarkovModel({"a"}, SquareMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}})), DomainError);
  EXPECT_THROW(SquareMatrix::from_rows({{1, 0}}), DomainError);
}

TEST(Markov, StationaryDistribution) {
  const MarkovModel m = two_state();
  EXPECT_NEAR(m.stationary()[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.stationary()[1], 1.0 / 3.0, 1e-12);
  const std::vector<std::size_t> seq{0, 0, 1};
  EXPECT_NEAR(m.sequence_probability(seq), 2.0 / 3.0 * 0.8 * 0.2, 1e-12);
}

TEST(Markov, RankOneChainReducesToTilt) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const Pmf p = gwtest::random_pmf(rng, 2 + trial % 6);
    const double rho = 0.25 + 0.25 * (trial % 8);
    const MarkovModel chain = MarkovModel::iid(p);
    EXPECT_NEAR(markov_sync_exponent(chain, rho), sync_exponent(p, rho), 1e-10);
    const MarkovModel guesser = optimal_markov_guesser(chain, rho);
    const Pmf t = tilt(p, 1.0 / (1.0 + rho));
    for (std::size_t a = 0; a < p.size(); ++a) EXPECT_LT(l1_distance(guesser.row(a), t), 1e-10);
  }
}

TEST(Markov, ExponentMatchesSequenceSums) {
  // sum_x P(x^n)^{1/(1+rho)} grows like lambda^n; its one-step ratio converges geometrically.
  const MarkovModel m = two_state();
  for (double rho : {0.5, 1.0, 2.0}) {
    const double theta = 1.0 / (1.0 + rho);
    const double step = log_power_sum(m, 14, theta) - log_power_sum(m, 13, theta);
    EXPECT_NEAR((1.0 + rho) * step, markov_sync_exponent(m, rho), 1e-8);
  }
}

TEST(Markov, GuesserRowsAreStochastic) {
  const MarkovModel g = optimal_markov_guesser(two_state(), 1.0);
  for (std::size_t a = 0; a < g.size(); ++a) {
    double s = 0;
    for (double x : g.transitions().row(a)) s += x;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  EXPECT_EQ(g.states(), (Alphabet{"a", "b"}));
}
