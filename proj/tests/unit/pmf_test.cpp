#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "guesswork/errors.hpp"
#include "guesswork/pmf.hpp"
#include "test_support.hpp"

using namespace guesswork;

TEST(Pmf, RejectsInvalidInput) {
  EXPECT_THROW(Pmf(Alphabet{"a", "b"}, {0.5}), DomainError);
  EXPECT_THROW(Pmf(Alphabet{}, {}), DomainError);
  EXPECT_THROW(Pmf(Alphabet{"a", "b"}, {0.7, 0.7}), DomainError);
  EXPECT_THROW(Pmf(Alphabet{"a", "b"}, {1.2, -0.2}), DomainError);
  EXPECT_THROW(Pmf(Alphabet{"a", "a"}, {0.5, 0.5}), DomainError);
  EXPECT_THROW(Pmf(Alphabet{"a", "b"}, {NAN, 1.0}), DomainError);
  EXPECT_THROW(Pmf::bernoulli(1.5), DomainError);
}

TEST(Pmf, AcceptsSumWithinTolerance) {
  EXPECT_NO_THROW(Pmf(Alphabet{"a", "b"}, {0.5 + 4e-13, 0.5}));
  EXPECT_THROW(Pmf(Alphabet{"a", "b"}, {0.5 + 1e-9, 0.5}), DomainError);
}

TEST(Pmf, RenormalizeRefusesLargeDrift) {
  EXPECT_NO_THROW(Pmf::renormalized(indexed_alphabet(2), {0.2 + 1e-8, 0.8}));
  EXPECT_THROW(Pmf::renormalized(indexed_alphabet(2), {0.3, 0.8}), DomainError);
  const Pmf n = Pmf::normalized(indexed_alphabet(2), {1.0, 3.0});
  EXPECT_DOUBLE_EQ(n[0], 0.25);
}

TEST(Pmf, Accessors) {
  const Pmf p(Alphabet{"x", "y", "z"}, {0.5, 0.0, 0.5});
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(p.support_size(), 2u);
  EXPECT_TRUE(p.is_uniform_on_support());
  EXPECT_EQ(p.index_of("z"), std::optional<std::size_t>(2));
  EXPECT_FALSE(p.index_of("w").has_value());
  EXPECT_FALSE(Pmf::bernoulli(0.2).is_uniform_on_support());
}

TEST(Tilt, HalfPowerOfBernoulli) {
  // sqrt(0.2) / sqrt(0.8) = 1/2, so the tilt is (1/3, 2/3).
  const Pmf q = tilt(Pmf::bernoulli(0.2), 0.5);
  EXPECT_NEAR(q[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(q[1], 2.0 / 3.0, 1e-15);
}

TEST(Tilt, MatchesLongDoubleRatio) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Pmf p = gwtest::random_pmf(rng, 2 + trial % 15);
    const double theta = 0.1 + 0.2 * (trial % 10);
    const Pmf q = tilt(p, theta);
    long double z = 0;
    for (double x : p.probs()) z += std::pow(static_cast<long double>(x), static_cast<long double>(theta));
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto ref = static_cast<double>(std::pow(static_cast<long double>(p[i]), static_cast<long double>(theta)) / z);
      EXPECT_NEAR(q[i], ref, 1e-14 * std::max(1.0, ref));
    }
  }
}

TEST(Tilt, IdentityZerosAndErrors) {
  const Pmf p(Alphabet{"a", "b", "c"}, {0.25, 0.0, 0.75});
  const Pmf one = tilt(p, 1.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(one[i], p[i], 1e-15);
  EXPECT_EQ(tilt(p, 3.0)[1], 0.0);
  EXPECT_EQ(tilt(p, 3.0).symbols(), p.symbols());
  EXPECT_THROW(tilt(p, 0.0), DomainError);
  EXPECT_THROW(tilt(p, -1.0), DomainError);
}

TEST(Tilt, UniformIsFixedPoint) {
  const Pmf u = Pmf::uniform(7);
  for (double theta : {0.1, 1.0, 10.0}) {
    const Pmf q = tilt(u, theta);
    for (double x : q.probs()) EXPECT_NEAR(x, 1.0 / 7.0, 1e-15);
  }
}

TEST(Tilt, ComposesMultiplicatively) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Pmf p = gwtest::random_pmf(rng, 6);
    const Pmf a = tilt(tilt(p, 0.7), 2.5);
    const Pmf b = tilt(p, 0.7 * 2.5);
    EXPECT_LT(l1_distance(a, b), 1e-14);
  }
}

TEST(Tilt, LargeExponentDoesNotOverflow) {
  const Pmf q = tilt(Pmf::indexed({0.5, 0.3, 0.2}), 2000.0);
  EXPECT_NEAR(q[0], 1.0, 1e-15);
}

TEST(ConditionalTilt, TiltsEachRow) {
  const ConditionalPmf c({{"y0", Pmf::bernoulli(0.2)}, {"y1", Pmf::bernoulli(0.5)}});
  const ConditionalPmf t = conditional_tilt(c, 0.5);
  EXPECT_NEAR(t.row(0)[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.row(1)[0], 0.5, 1e-15);
  EXPECT_EQ(t.given(1), "y1");
  ASSERT_NE(t.find("y0"), nullptr);
  EXPECT_EQ(t.find("nope"), nullptr);
  EXPECT_THROW(ConditionalPmf({{"y", Pmf::bernoulli(0.2)}, {"y", Pmf::bernoulli(0.3)}}), DomainError);
  EXPECT_THROW(ConditionalPmf({{"y", Pmf::bernoulli(0.2)}, {"z", Pmf::uniform(3)}}), DomainError);
}

TEST(Entropy, ShannonRenyiAndDivergences) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Pmf p = gwtest::random_pmf(rng, 2 + trial % 12);
    const Pmf q = gwtest::random_pmf(rng, p.size());
    const auto pv = gwtest::to_vec(p);
    const auto qv = gwtest::to_vec(q);
    EXPECT_NEAR(shannon_entropy(p), gwtest::entropy_direct(pv), 1e-13);
    EXPECT_NEAR(kl_divergence(q, p), gwtest::kl_direct(qv, pv), 1e-13);
    EXPECT_NEAR(cross_entropy(q, p), kl_divergence(q, p) + shannon_entropy(q), 1e-13);
    EXPECT_NEAR(kl_divergence(p, p), 0.0, 1e-15);
    EXPECT_NEAR(renyi_entropy(p, 1.0 + 1e-12), shannon_entropy(p), 1e-12);
    // Renyi entropy is non-increasing in its order.
    double prev = renyi_entropy(p, 0.05);
    for (double a : {0.3, 0.5, 0.9, 1.0, 1.5, 2.0, 5.0}) {
      const double h = renyi_entropy(p, a);
      EXPECT_LE(h, prev + 1e-12);
      prev = h;
    }
  }
}

TEST(Entropy, ClosedForms) {
  EXPECT_NEAR(shannon_entropy(Pmf::uniform(8)), std::log(8.0), 1e-15);
  EXPECT_NEAR(renyi_entropy(Pmf::uniform(8), 0.5), std::log(8.0), 1e-14);
  // H_{1/2}(Ber(0.2)) = 2 log(sqrt(0.2) + sqrt(0.8)) = log 1.8.
  EXPECT_NEAR(renyi_entropy(Pmf::bernoulli(0.2), 0.5), std::log(1.8), 1e-15);
  EXPECT_EQ(shannon_entropy(Pmf::point_mass(4, 2)), 0.0);
  EXPECT_THROW(renyi_entropy(Pmf::uniform(3), 0.0), DomainError);
}

TEST(Entropy, DivergenceInfiniteOffSupport) {
  const Pmf p = Pmf::point_mass(2, 0);
  const Pmf q = Pmf::uniform(2);
  EXPECT_TRUE(std::isinf(kl_divergence(q, p)));
  EXPECT_TRUE(std::isfinite(kl_divergence(p, q)));
  EXPECT_THROW(kl_divergence(q, Pmf::uniform(3)), DomainError);
}

TEST(Product, LexicographicOrderAndValues) {
  const Pmf p2 = product_pmf(Pmf::bernoulli(0.2), 2);
  ASSERT_EQ(p2.size(), 4u);
  EXPECT_NEAR(p2[0], 0.04, 1e-16);
  EXPECT_NEAR(p2[1], 0.16, 1e-16);
  EXPECT_NEAR(p2[2], 0.16, 1e-16);
  EXPECT_NEAR(p2[3], 0.64, 1e-16);
  EXPECT_EQ(p2.symbol(1), "01");
  EXPECT_EQ(p2.symbol(2), "10");
}

TEST(Product, SameTypeSequencesAreBitIdentical) {
  const Pmf p = Pmf::indexed({0.1, 0.3, 0.6});
  const Pmf p3 = product_pmf(p, 3);
  // "012", "021", "102", "120", "201", "210" share a type.
  const std::vector<std::size_t> perms{5, 7, 11, 15, 19, 21};
  for (std::size_t c : perms) EXPECT_EQ(p3[c], p3[perms[0]]);
  EXPECT_NEAR(shannon_entropy(p3), 3 * shannon_entropy(p), 1e-13);
}

TEST(Product, EnforcesSizeCap) { EXPECT_THROW(product_pmf(Pmf::uniform(10), 8), DomainError); }

TEST(EntropyMatch, HitsTargetsAndLimits) {
  const Pmf p = Pmf::indexed({0.5, 0.3, 0.2});
  const auto at_h = entropy_matching_tilt(p, shannon_entropy(p));
  EXPECT_NEAR(at_h.beta, 1.0, 1e-8);
  const auto top = entropy_matching_tilt(p, std::log(3.0));
  EXPECT_EQ(top.beta, 0.0);
  EXPECT_NEAR(top.distribution[0], 1.0 / 3.0, 1e-15);
  const auto mid = entropy_matching_tilt(p, 0.6);
  EXPECT_NEAR(shannon_entropy(mid.distribution), 0.6, 1e-10);
  EXPECT_GT(mid.beta, 1.0);
}

TEST(Limits, SupportAndModeUniforms) {
  const Pmf p(Alphabet{"a", "b", "c", "d"}, {0.4, 0.0, 0.4, 0.2});
  const Pmf u = uniform_on_support(p);
  EXPECT_NEAR(u[0], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(u[1], 0.0);
  const Pmf m = uniform_on_mode(p);
  EXPECT_NEAR(m[0], 0.5, 1e-15);
  EXPECT_NEAR(m[2], 0.5, 1e-15);
  EXPECT_EQ(m[3], 0.0);
  EXPECT_LT(l1_distance(tilt_or_limit(p, 0.0), u), 1e-15);
}
