#include "guesswork/guesswork.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "guesswork/errors.hpp"
#include "guesswork/numeric.hpp"

namespace guesswork {

namespace {

void require_rho(double rho, const char* where) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError(std::string(where) + ": rho must be positive and finite");
}

// log sum_{x: p(x) > 0} p(x)^order
double log_power_sum(const Pmf& p, double order) {
  std::vector<double> terms;
  terms.reserve(p.size());
  for (double x : p.probs()) {
    if (x > 0.0) terms.push_back(order * std::log(x));
  }
  return log_sum_exp(terms);
}

}  // namespace

MomentParam MomentParam::make(double rho, std::optional<double> gamma) {
  require_rho(rho, "MomentParam");
  if (gamma && (!(*gamma > 0.0) || !std::isfinite(*gamma))) throw DomainError("MomentParam: gamma must be positive");
  return MomentParam{rho, gamma};
}

std::string_view to_string(MomentKind kind) {
  switch (kind) {
    case MomentKind::kExactGuesswork: return "exact-G-moment";
    case MomentKind::kVRho: return "V-rho";
    case MomentKind::kGMoment: return "G-moment";
    case MomentKind::kArikanLower: return "arikan-lower";
    case MomentKind::kArikanUpper: return "arikan-upper";
    case MomentKind::kExponent: return "exponent";
  }
  return "unknown";
}

GuessList::GuessList(std::vector<std::size_t> order) : order_(std::move(order)), rank_of_(order_.size(), 0) {
  for (std::size_t r = 0; r < order_.size(); ++r) {
    if (order_[r] >= order_.size() || rank_of_[order_[r]] != 0) throw DomainError("GuessList: not a permutation");
    rank_of_[order_[r]] = r + 1;
  }
}

GuessList optimal_list(const Pmf& p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  return GuessList(std::move(order));
}

AnalyticMoment exact_guesswork_moment(const Pmf& p, double rho) {
  require_rho(rho, "exact_guesswork_moment");
  const GuessList list = optimal_list(p);
  CompensatedSum m;
  for (std::size_t r = 1; r <= list.size(); ++r) {
    const double prob = p[list.at_rank(r)];
    if (prob > 0.0) m.add(std::pow(static_cast<double>(r), rho) * prob);
  }
  return {m.value(), MomentKind::kExactGuesswork, false};
}

ArikanBounds arikan_bounds(const Pmf& p, double rho) {
  require_rho(rho, "arikan_bounds");
  const double log_upper = (1.0 + rho) * log_power_sum(p, 1.0 / (1.0 + rho));
  const double log_lower = log_upper - rho * std::log1p(std::log(static_cast<double>(p.size())));
  return {{std::exp(log_lower), MomentKind::kArikanLower, false}, {std::exp(log_upper), MomentKind::kArikanUpper, false}};
}

double sync_exponent(const Pmf& p, double rho) {
  require_rho(rho, "sync_exponent");
  return rho * renyi_entropy(p, 1.0 / (1.0 + rho));
}

AnalyticMoment iid_v_moment(const Pmf& p, const Pmf& phat, double rho) {
  require_rho(rho, "iid_v_moment");
  if (!p.same_alphabet(phat)) throw DomainError("iid_v_moment: distributions are over different alphabets");
  std::vector<double> terms;
  terms.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (phat[i] <= 0.0) return {kInf, MomentKind::kVRho, false};
    terms.push_back(std::log(p[i]) - rho * std::log(phat[i]));
  }
  return {std::exp(log_sum_exp(terms)), MomentKind::kVRho, false};
}

OptimalIid optimal_iid_distribution(const Pmf& p, double rho) {
  require_rho(rho, "optimal_iid_distribution");
  return {tilt(p, 1.0 / (1.0 + rho)), {sync_exponent(p, rho), MomentKind::kVRho, true}};
}

double geometric_moment(double q, double rho, double tail_eps) {
  require_rho(rho, "geometric_moment");
  if (!(tail_eps > 0.0)) throw DomainError("geometric_moment: tail_eps must be positive");
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("geometric_moment: success probability must lie in (0, 1]");
  if (q == 1.0) return 1.0;
  const double y = 1.0 - q;
  const double log_y = std::log1p(-q);
  const double log_q = std::log(q);
  auto log_term = [&](double k) { return rho * std::log(k) + (k - 1.0) * log_y + log_q; };

  constexpr std::uint64_t kMaxTerms = 2'000'000'000ULL;
  CompensatedSum sum;
  for (std::uint64_t k = 1; k < kMaxTerms; ++k) {
    const double kd = static_cast<double>(k);
    sum.add(std::exp(log_term(kd)));
    // Term ratios ((j+1)/j)^rho y decrease in j, so once the ratio at k+1 is
    // below one the tail is dominated by a geometric series.
    const double ratio = std::pow((kd + 2.0) / (kd + 1.0), rho) * y;
    if (ratio < 1.0) {
      const double tail = std::exp(log_term(kd + 1.0)) / (1.0 - ratio);
      if (tail <= tail_eps * sum.value()) return sum.value();
    }
  }
  throw NumericError("geometric_moment: series did not converge");
}

AnalyticMoment iid_g_moment_numeric(const Pmf& p, const Pmf& phat, double rho, double tail_eps) {
  require_rho(rho, "iid_g_moment_numeric");
  if (!(tail_eps > 0.0)) throw DomainError("iid_g_moment_numeric: tail_eps must be positive");
  if (!p.same_alphabet(phat)) throw DomainError("iid_g_moment_numeric: distributions are over different alphabets");
  CompensatedSum m;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (phat[i] <= 0.0) return {kInf, MomentKind::kGMoment, false};
    m.add(p[i] * geometric_moment(phat[i], rho, tail_eps));
  }
  return {m.value(), MomentKind::kGMoment, false};
}

double mismatch_exponent(const Pmf& p, double rho, double gamma) {
  require_rho(rho, "mismatch_exponent");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("mismatch_exponent: gamma must be positive");
  // Substituting phat = tilt(p, 1/(1+gamma)) into sum p / phat^rho gives
  //   log sum p^{1 - rho/(1+gamma)} + rho log sum p^{1/(1+gamma)},
  // i.e. (rho/(1+gamma)) H_a + (gamma rho/(1+gamma)) H_{1/(1+gamma)} with
  // a = (gamma - rho + 1)/(1 + gamma). Over a finite support this is finite
  // for every order a, including a <= 0 and the Shannon point a = 1.
  const double theta = 1.0 / (1.0 + gamma);
  return log_power_sum(p, 1.0 - rho * theta) + rho * log_power_sum(p, theta);
}

double iid_success_probability(const Pmf& p, const Pmf& phat, std::uint64_t i) {
  if (!p.same_alphabet(phat)) throw DomainError("iid_success_probability: distributions use different alphabets");
  const double queries = static_cast<double>(i);
  CompensatedSum sum;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0 || phat[x] == 0.0) continue;
    const double miss_all = phat[x] == 1.0 ? 0.0 : std::exp(queries * std::log1p(-phat[x]));
    sum += p[x] * (1.0 - miss_all);
  }
  return std::min(1.0, sum.value());
}

double j_guesswork_exponent(const Pmf& p, double alpha) {
  const double log_m = std::log(static_cast<double>(p.size()));
  if (!(alpha >= 0.0) || alpha > log_m + 1e-12) throw DomainError("j_guesswork_exponent: alpha must lie in [0, log|X|]");
  if (alpha < shannon_entropy(p)) return alpha;
  const EntropyMatch match = entropy_matching_tilt(p, alpha);
  return std::max(alpha - kl_divergence(match.distribution, p), renyi_entropy(p, 0.5));
}

ConditionalOptimalIid conditional_optimal_iid(const ConditionalPmf& c, const Pmf& marginal_y, double rho) {
  require_rho(rho, "conditional_optimal_iid");
  if (marginal_y.size() != c.size()) throw DomainError("conditional_optimal_iid: marginal and rows have different supports");
  const double theta = 1.0 / (1.0 + rho);
  std::vector<double> terms;
  for (std::size_t j = 0; j < marginal_y.size(); ++j) {
    const Pmf* row = c.find(marginal_y.symbol(j));
    if (row == nullptr) {
      throw DomainError("conditional_optimal_iid: no row for side information '" + marginal_y.symbol(j) + "'");
    }
    if (marginal_y[j] > 0.0) terms.push_back(std::log(marginal_y[j]) + (1.0 + rho) * log_power_sum(*row, theta));
  }
  return {conditional_tilt(c, theta), log_sum_exp(terms)};
}

}  // namespace guesswork
