#include "guesswork/zipf.hpp"

#include <cmath>
#include <string>

#include "guesswork/errors.hpp"
#include "guesswork/numeric.hpp"

namespace guesswork {

namespace {

double cdf_constant(std::size_t m, double s) { return 1.0 / std::pow(static_cast<double>(m), s); }

}  // namespace

double generalized_harmonic(std::size_t m, double s) {
  // Smallest terms first.
  CompensatedSum h;
  for (std::size_t j = m; j >= 1; --j) h.add(std::pow(static_cast<double>(j), -s));
  return h.value();
}

ZipfSpec ZipfSpec::make(std::size_t m, double s, ZipfVariant variant) {
  ZipfSpec spec{m, s, variant, 0.0};
  if (m == 0) throw DomainError("zipf: alphabet size must be positive");
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("zipf: exponent must be finite and >= 0");
  if (variant == ZipfVariant::kCdf && s > 1.0) throw DomainError("zipf: CDF variant requires 0 <= s <= 1");
  spec.normalizer = variant == ZipfVariant::kPdf ? generalized_harmonic(m, s) : cdf_constant(m, s);
  return spec;
}

void ZipfSpec::validate() const {
  const ZipfSpec expected = make(m, s, variant);
  if (!(std::abs(normalizer - expected.normalizer) <= 1e-12 * std::max(1.0, std::abs(expected.normalizer)))) {
    throw DomainError("zipf: normalizer " + std::to_string(normalizer) + " does not match recomputed value");
  }
}

Pmf zipf_pmf(const ZipfSpec& spec) {
  spec.validate();
  std::vector<double> probs(spec.m);
  if (spec.variant == ZipfVariant::kPdf) {
    for (std::size_t i = 1; i <= spec.m; ++i) {
      probs[i - 1] = std::pow(static_cast<double>(i), -spec.s) / spec.normalizer;
    }
  } else {
    // CDF(i) = C i^s with CDF(0) = 0.
    for (std::size_t i = 1; i <= spec.m; ++i) {
      const double upper = std::pow(static_cast<double>(i), spec.s);
      const double lower = i == 1 ? 0.0 : std::pow(static_cast<double>(i - 1), spec.s);
      probs[i - 1] = spec.normalizer * (upper - lower);
    }
  }
  return Pmf::renormalized(indexed_alphabet(spec.m), std::move(probs));
}

}  // namespace guesswork
