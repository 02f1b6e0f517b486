#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace guesswork {

using Alphabet = std::vector<std::string>;
using AlphabetPtr = std::shared_ptr<const Alphabet>;

/// Symbols "0", "1", ..., "m-1".
AlphabetPtr indexed_alphabet(std::size_t m);

/// Finite probability distribution over an ordered alphabet.
///
/// Immutable after construction. Probabilities sum to one within
/// kSumTolerance, are non-negative, and the symbol order is preserved by
/// every operation that derives a new Pmf from an existing one. Zero
/// probabilities are allowed.
class Pmf {
 public:
  static constexpr double kSumTolerance = 1e-12;
  static constexpr double kRenormalizeTolerance = 1e-6;

  Pmf(std::vector<std::string> symbols, std::vector<double> probs);

  /// Symbols "0", "1", ..., "m-1".
  static Pmf indexed(std::vector<double> probs);
  static Pmf uniform(std::size_t m);
  static Pmf point_mass(std::size_t m, std::size_t at);
  /// Binary distribution over {"0","1"} with P("0") = p0.
  static Pmf bernoulli(double p0);

  /// Rescales `weights` to sum to one. Throws DomainError when the input sum
  /// is further than kRenormalizeTolerance from one; use normalized() for
  /// arbitrary positive weights.
  static Pmf renormalized(AlphabetPtr alphabet, std::vector<double> weights);
  /// Rescales arbitrary non-negative weights (not all zero).
  static Pmf normalized(AlphabetPtr alphabet, std::vector<double> weights);

  /// Same alphabet, new (validated) probabilities.
  Pmf with_probs(std::vector<double> probs) const;

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  const std::string& symbol(std::size_t i) const { return (*alphabet_)[i]; }
  const Alphabet& symbols() const { return *alphabet_; }
  const AlphabetPtr& alphabet() const { return alphabet_; }

  std::optional<std::size_t> index_of(std::string_view symbol) const;
  bool same_alphabet(const Pmf& other) const;
  /// Number of symbols with strictly positive probability.
  std::size_t support_size() const;
  bool is_uniform_on_support() const;

 private:
  Pmf(AlphabetPtr alphabet, std::vector<double> probs);
  void validate() const;

  AlphabetPtr alphabet_;
  std::vector<double> probs_;
};

/// Family of Pmfs P(x|y) indexed by side information y. All rows share the
/// same X-alphabet; row order is insertion order.
class ConditionalPmf {
 public:
  explicit ConditionalPmf(std::vector<std::pair<std::string, Pmf>> rows);

  std::size_t size() const { return rows_.size(); }
  const std::string& given(std::size_t i) const { return rows_[i].first; }
  const Pmf& row(std::size_t i) const { return rows_[i].second; }
  const Pmf* find(std::string_view y) const;

 private:
  std::vector<std::pair<std::string, Pmf>> rows_;
};

/// P^(theta)(x) = P(x)^theta / sum_x' P(x')^theta, evaluated in log space.
/// Zero-probability symbols stay at zero.
Pmf tilt(const Pmf& p, double theta);
ConditionalPmf conditional_tilt(const ConditionalPmf& c, double theta);

/// Entropies and divergences, all in nats.
double shannon_entropy(const Pmf& p);
/// Order-alpha Renyi entropy; delegates to shannon_entropy when
/// |alpha - 1| < 1e-9.
double renyi_entropy(const Pmf& p, double alpha);
/// D(q||p). +infinity when q puts mass where p has none.
double kl_divergence(const Pmf& q, const Pmf& p);
/// -sum_x q(x) log p(x) = D(q||p) + H(q).
double cross_entropy(const Pmf& q, const Pmf& p);

/// The n-fold i.i.d. product of p over sequences in lexicographic order of
/// symbol indices (first position most significant). Sequences of the same
/// type get bit-identical probabilities.
Pmf product_pmf(const Pmf& p, std::size_t n);

double l1_distance(const Pmf& a, const Pmf& b);

}  // namespace guesswork

namespace guesswork {

/// Uniform distribution over the positive-probability symbols of p (the
/// beta -> 0 limit of the tilted family).
Pmf uniform_on_support(const Pmf& p);
/// Uniform distribution over the most probable symbols of p (the
/// beta -> infinity limit of the tilted family).
Pmf uniform_on_mode(const Pmf& p);
/// tilt(p, beta) extended to beta = 0 by continuity.
Pmf tilt_or_limit(const Pmf& p, double beta);

struct EntropyMatch {
  double beta = 0.0;
  Pmf distribution;
  double residual = 0.0;  // |H(distribution) - target|
};

/// Finds beta in [0, beta_max] with H(tilt(p, beta)) = target by bisection
/// (the entropy of the tilted family is non-increasing in beta). Targets at
/// or above log|supp p| give beta = 0; targets below the entropy reachable
/// at beta_max return beta_max.
EntropyMatch entropy_matching_tilt(const Pmf& p, double target_nats, double beta_max = 50.0,
                                   double tolerance = 1e-10);

}  // namespace guesswork
