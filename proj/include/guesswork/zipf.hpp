#pragma once

#include <cstddef>

#include "guesswork/pmf.hpp"

namespace guesswork {

enum class ZipfVariant { kPdf, kCdf };

/// Parametric password-frequency model over ranks 1..m.
///
///   PDF-Zipf: p(i) = i^{-s} / H_{m,s}
///   CDF-Zipf: p(i) = C (i^s - (i-1)^s), C = 1 / m^s, 0 <= s <= 1
///
/// `normalizer` holds H_{m,s} for the PDF variant and C for the CDF variant.
struct ZipfSpec {
  std::size_t m = 0;
  double s = 0.0;
  ZipfVariant variant = ZipfVariant::kPdf;
  double normalizer = 0.0;

  /// Builds a spec with the normalizer filled in; throws DomainError on
  /// m = 0, s < 0, or a CDF exponent outside [0, 1].
  static ZipfSpec make(std::size_t m, double s, ZipfVariant variant);
  /// Throws DomainError if any field invariant is violated.
  void validate() const;
};

/// Generalized harmonic number H_{m,s} = sum_{j=1}^m j^{-s}.
double generalized_harmonic(std::size_t m, double s);

Pmf zipf_pmf(const ZipfSpec& spec);

}  // namespace guesswork
