#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "guesswork/pmf.hpp"

namespace guesswork {

/// Guesswork moment orders: rho for the cost being measured and, optionally,
/// the moment gamma that an i.i.d. guessing distribution was tuned for.
struct MomentParam {
  double rho = 1.0;
  std::optional<double> gamma;

  static MomentParam make(double rho, std::optional<double> gamma = std::nullopt);
};

enum class MomentKind { kExactGuesswork, kVRho, kGMoment, kArikanLower, kArikanUpper, kExponent };

std::string_view to_string(MomentKind kind);

struct AnalyticMoment {
  double value = 0.0;
  MomentKind kind = MomentKind::kExactGuesswork;
  bool is_log = false;  // value is the natural log of the moment
};

/// Deterministic guessing order: symbols by decreasing probability, ties in
/// support order. Ranks are 1-based.
class GuessList {
 public:
  explicit GuessList(std::vector<std::size_t> order);

  std::size_t size() const { return order_.size(); }
  /// Support index of the symbol guessed at `rank` (1-based).
  std::size_t at_rank(std::size_t rank) const { return order_[rank - 1]; }
  std::size_t rank_of(std::size_t symbol_index) const { return rank_of_[symbol_index]; }
  const std::vector<std::size_t>& order() const { return order_; }

 private:
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rank_of_;
};

GuessList optimal_list(const Pmf& p);

/// E[G*(X)^rho] = sum_x rank(x)^rho p(x).
AnalyticMoment exact_guesswork_moment(const Pmf& p, double rho);

struct ArikanBounds {
  AnalyticMoment lower;
  AnalyticMoment upper;
};

/// lower = (1 + log|X|)^{-rho} (sum p^{1/(1+rho)})^{1+rho}, upper drops the
/// prefactor.
ArikanBounds arikan_bounds(const Pmf& p, double rho);

/// rho * H_{1/(1+rho)}(p), nats per symbol.
double sync_exponent(const Pmf& p, double rho);

/// E[V_rho] for guesses drawn i.i.d. from phat: sum_x p(x) / phat(x)^rho.
/// +infinity when phat misses part of p's support.
AnalyticMoment iid_v_moment(const Pmf& p, const Pmf& phat, double rho);

struct OptimalIid {
  Pmf distribution;
  AnalyticMoment log_moment;  // log E[V*_rho] = rho H_{1/(1+rho)}(p)
};

/// The minimizer of iid_v_moment over phat: tilt(p, 1/(1+rho)).
OptimalIid optimal_iid_distribution(const Pmf& p, double rho);

/// E[G^rho] for i.i.d. guessing from phat, summing the geometric series per
/// symbol until the remaining tail is provably below tail_eps times the
/// accumulated value.
AnalyticMoment iid_g_moment_numeric(const Pmf& p, const Pmf& phat, double rho, double tail_eps = 1e-9);

/// sum_{k>=1} k^rho (1-q)^{k-1} q, the rho-th moment of a geometric variable
/// with success probability q in (0, 1].
double geometric_moment(double q, double rho, double tail_eps = 1e-9);

/// P(G <= i) for i.i.d. guessing from phat: sum_x p(x) (1 - (1 - phat(x))^i).
double iid_success_probability(const Pmf& p, const Pmf& phat, std::uint64_t i);

/// log E[V_rho] when guessing i.i.d. from the distribution tuned for moment
/// gamma. Equals sync_exponent(p, rho) iff gamma == rho.
double mismatch_exponent(const Pmf& p, double rho, double gamma);

/// Exponent of the expected number of guesses of an attacker that stops
/// after exp(n alpha) queries.
double j_guesswork_exponent(const Pmf& p, double alpha);

struct ConditionalOptimalIid {
  ConditionalPmf distribution;
  double log_moment = 0.0;  // log sum_y P(y) (sum_x P(x|y)^{1/(1+rho)})^{1+rho}
};

/// Targeted attack with side information Y: tilt each row by 1/(1+rho).
/// marginal_y must be a distribution over exactly the row labels of c.
ConditionalOptimalIid conditional_optimal_iid(const ConditionalPmf& c, const Pmf& marginal_y, double rho);

}  // namespace guesswork
