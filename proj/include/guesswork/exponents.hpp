#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "guesswork/pmf.hpp"

namespace guesswork {

/// Guess budget J = ceil(exp(n * alpha)), alpha in nats per symbol. The
/// "list size exponent" convention J = ceil(|X|^{n a}) maps to alpha = a log|X|.
class ListGrowthRate {
 public:
  static ListGrowthRate from_nats(double alpha, std::size_t alphabet_size);
  static ListGrowthRate from_base_exponent(double a, std::size_t alphabet_size);

  double nats() const { return nats_; }
  std::size_t alphabet_size() const { return alphabet_size_; }

 private:
  ListGrowthRate(double nats, std::size_t m) : nats_(nats), alphabet_size_(m) {}
  double nats_;
  std::size_t alphabet_size_;
};

enum class ExponentSolver { kTiltedBisection, kSimplexGrid };
std::string_view to_string(ExponentSolver solver);

struct ExponentReport {
  double value = 0.0;  // nats per symbol; +infinity is a legal value
  Pmf argmin_type;
  ExponentSolver solver = ExponentSolver::kTiltedBisection;
  double residual = 0.0;
  /// argmin_type = tilt(p, type_tilt); absent for limit points (beta -> inf).
  std::optional<double> type_tilt;
  /// Tilt of the i.i.d. guessing distribution (async exponents only).
  std::optional<double> guesser_tilt;
};

/// Which types the asynchronous exponent minimizes over.
enum class AsyncDomain {
  kFullSimplex,     // every Q, as in the binary-alphabet derivation
  kGuessListTypes,  // Q restricted to the guess-list type set Q(alpha)
};

/// argmin of D(Q||p) + H(Q) = cross_entropy(Q, p) subject to H(Q) >= alpha.
/// The minimizer is the tilt of p whose entropy equals alpha.
Pmf threshold_type(const Pmf& p, double alpha);

/// Whether sequences of type q sit among the first exp(n alpha) positions of
/// the optimal list: cross_entropy(q, p) < cross_entropy(Q*, p), strictly.
bool in_guess_list(const Pmf& q, const Pmf& p, double alpha);

/// Success exponent of the synchronized optimal-list attacker.
ExponentReport sync_success_exponent(const Pmf& p, double alpha);

/// Success exponent of an i.i.d. guesser drawing from tilt(p, beta):
///   min_Q D(Q||p) + [D(Q||p^(beta)) + H(Q) - alpha]_+ .
ExponentReport async_success_exponent(const Pmf& p, double alpha, double beta,
                                      AsyncDomain domain = AsyncDomain::kFullSimplex);

/// The async objective at a single type Q.
double async_objective(const Pmf& q, const Pmf& p, double alpha, double beta);

/// min over beta in [0, beta_max] of async_success_exponent, by a grid over
/// beta refined with golden-section search. guesser_tilt holds the best beta.
ExponentReport min_beta_async_exponent(const Pmf& p, double alpha, double beta_max = 50.0);

/// Exponent of the probability that exp(n alpha) optimal-list guesses all
/// miss: min D(Q||p) over types outside the guess-list type set.
ExponentReport failure_exponent(const Pmf& p, double alpha);

}  // namespace guesswork
