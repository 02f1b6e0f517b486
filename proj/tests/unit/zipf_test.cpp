#include <gtest/gtest.h>

#include <cmath>

#include "guesswork/errors.hpp"
#include "guesswork/zipf.hpp"

using namespace guesswork;

namespace {

long double harmonic_reference(std::size_t m, double s) {
  long double h = 0;
  for (std::size_t j = m; j >= 1; --j) h += std::pow(static_cast<long double>(j), -static_cast<long double>(s));
  return h;
}

}  // namespace

TEST(Harmonic, MatchesLongDoubleSum) {
  for (auto [m, s] : {std::pair<std::size_t, double>{1, 1.0}, {100, 1.0}, {1000, 0.8}, {10000, 0.45}, {50, 0.0}}) {
    const auto ref = static_cast<double>(harmonic_reference(m, s));
    EXPECT_NEAR(generalized_harmonic(m, s), ref, 1e-13 * ref) << m << " " << s;
  }
  EXPECT_NEAR(generalized_harmonic(3, 1.0), 1.0 + 0.5 + 1.0 / 3.0, 1e-15);
}

TEST(ZipfPdf, ProbabilitiesFollowPowerLaw) {
  const auto spec = ZipfSpec::make(100, 1.0, ZipfVariant::kPdf);
  const Pmf p = zipf_pmf(spec);
  ASSERT_EQ(p.size(), 100u);
  EXPECT_NEAR(p[0], 1.0 / spec.normalizer, 1e-15);
  EXPECT_NEAR(p[9] / p[0], 0.1, 1e-13);
  EXPECT_EQ(p.symbol(0), "0");
}

TEST(ZipfPdf, ZeroExponentIsUniform) {
  const Pmf p = zipf_pmf(ZipfSpec::make(20, 0.0, ZipfVariant::kPdf));
  for (double x : p.probs()) EXPECT_NEAR(x, 0.05, 1e-16);
}

TEST(ZipfCdf, TelescopesToOne) {
  const auto spec = ZipfSpec::make(1000, 0.3, ZipfVariant::kCdf);
  const Pmf p = zipf_pmf(spec);
  EXPECT_NEAR(spec.normalizer, std::pow(1000.0, -0.3), 1e-15);
  double cdf = 0;
  for (std::size_t i = 0; i < 10; ++i) cdf += p[i];
  EXPECT_NEAR(cdf, std::pow(10.0 / 1000.0, 0.3), 1e-12);
  for (std::size_t i = 1; i < p.size(); ++i) EXPECT_LE(p[i], p[i - 1] + 1e-18);
}

TEST(Zipf, RejectsBadParameters) {
  EXPECT_THROW(ZipfSpec::make(0, 1.0, ZipfVariant::kPdf), DomainError);
  EXPECT_THROW(ZipfSpec::make(10, -0.5, ZipfVariant::kPdf), DomainError);
  EXPECT_THROW(ZipfSpec::make(10, 1.5, ZipfVariant::kCdf), DomainError);
  ZipfSpec bad = ZipfSpec::make(10, 1.0, ZipfVariant::kPdf);
  bad.normalizer *= 1.01;
  EXPECT_THROW(bad.validate(), DomainError);
}
