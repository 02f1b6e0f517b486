#include "guesswork/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "guesswork/errors.hpp"
#include "guesswork/numeric.hpp"

namespace guesswork {

AlphabetPtr indexed_alphabet(std::size_t m) {
  auto symbols = std::make_shared<Alphabet>();
  symbols->reserve(m);
  for (std::size_t i = 0; i < m; ++i) symbols->push_back(std::to_string(i));
  return symbols;
}

namespace {

void require_same_alphabet(const Pmf& a, const Pmf& b, const char* what) {
  if (!a.same_alphabet(b)) {
    throw DomainError(std::string(what) + ": distributions are over different alphabets");
  }
}

}  // namespace

Pmf::Pmf(std::vector<std::string> symbols, std::vector<double> probs)
    : Pmf(std::make_shared<const Alphabet>(std::move(symbols)), std::move(probs)) {}

Pmf::Pmf(AlphabetPtr alphabet, std::vector<double> probs)
    : alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
  validate();
}

void Pmf::validate() const {
  if (!alphabet_ || alphabet_->size() != probs_.size()) {
    throw DomainError("Pmf: symbol and probability counts differ");
  }
  if (probs_.empty()) throw DomainError("Pmf: empty alphabet");
  for (double x : probs_) {
    if (!std::isfinite(x) || x < 0.0) throw DomainError("Pmf: probabilities must be finite and >= 0");
  }
  const double total = compensated_sum(probs_);
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw DomainError("Pmf: probabilities sum to " + std::to_string(total) + ", not 1");
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(alphabet_->size());
  for (const auto& s : *alphabet_) {
    if (!seen.insert(s).second) throw DomainError("Pmf: duplicate symbol '" + s + "'");
  }
}

Pmf Pmf::indexed(std::vector<double> probs) {
  auto alphabet = indexed_alphabet(probs.size());
  return Pmf(std::move(alphabet), std::move(probs));
}

Pmf Pmf::uniform(std::size_t m) {
  if (m == 0) throw DomainError("Pmf::uniform: empty alphabet");
  return normalized(indexed_alphabet(m), std::vector<double>(m, 1.0));
}

Pmf Pmf::point_mass(std::size_t m, std::size_t at) {
  if (at >= m) throw DomainError("Pmf::point_mass: index out of range");
  std::vector<double> probs(m, 0.0);
  probs[at] = 1.0;
  return indexed(std::move(probs));
}

Pmf Pmf::bernoulli(double p0) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw DomainError("Pmf::bernoulli: p0 must lie in [0, 1]");
  return indexed({p0, 1.0 - p0});
}

Pmf Pmf::renormalized(AlphabetPtr alphabet, std::vector<double> weights) {
  const double total = compensated_sum(weights);
  if (!(std::abs(total - 1.0) <= kRenormalizeTolerance)) {
    throw DomainError("Pmf::renormalized: drift " + std::to_string(total - 1.0) +
                      " exceeds renormalization tolerance");
  }
  return normalized(std::move(alphabet), std::move(weights));
}

Pmf Pmf::normalized(AlphabetPtr alphabet, std::vector<double> weights) {
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw DomainError("Pmf::normalized: weights must be finite and >= 0");
  }
  const double total = compensated_sum(weights);
  if (!(total > 0.0) || !std::isfinite(total)) throw DomainError("Pmf::normalized: weights sum to zero");
  for (double& w : weights) w /= total;
  return Pmf(std::move(alphabet), std::move(weights));
}

Pmf Pmf::with_probs(std::vector<double> probs) const { return Pmf(alphabet_, std::move(probs)); }

std::optional<std::size_t> Pmf::index_of(std::string_view symbol) const {
  const auto it = std::find(alphabet_->begin(), alphabet_->end(), symbol);
  if (it == alphabet_->end()) return std::nullopt;
  return static_cast<std::size_t>(it - alphabet_->begin());
}

bool Pmf::same_alphabet(const Pmf& other) const {
  return alphabet_ == other.alphabet_ || *alphabet_ == *other.alphabet_;
}

std::size_t Pmf::support_size() const {
  return static_cast<std::size_t>(std::count_if(probs_.begin(), probs_.end(), [](double x) { return x > 0.0; }));
}

bool Pmf::is_uniform_on_support() const {
  double first = 0.0;
  for (double x : probs_) {
    if (x <= 0.0) continue;
    if (first == 0.0) {
      first = x;
    } else if (std::abs(x - first) > 1e-15) {
      return false;
    }
  }
  return true;
}

ConditionalPmf::ConditionalPmf(std::vector<std::pair<std::string, Pmf>> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw DomainError("ConditionalPmf: no rows");
  std::unordered_set<std::string_view> seen;
  for (const auto& [y, row] : rows_) {
    if (!seen.insert(y).second) throw DomainError("ConditionalPmf: duplicate side-information value '" + y + "'");
    if (!row.same_alphabet(rows_.front().second)) {
      throw DomainError("ConditionalPmf: rows have different X-alphabets");
    }
  }
}

const Pmf* ConditionalPmf::find(std::string_view y) const {
  for (const auto& [key, row] : rows_) {
    if (key == y) return &row;
  }
  return nullptr;
}

Pmf tilt(const Pmf& p, double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("tilt: theta must be a positive finite number");
  std::vector<double> logw(p.size(), -kInf);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) logw[i] = theta * std::log(p[i]);
  }
  const double hi = *std::max_element(logw.begin(), logw.end());
  if (!std::isfinite(hi)) throw NumericError("tilt: exponent overflow");
  std::vector<double> w(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (logw[i] != -kInf) w[i] = std::exp(logw[i] - hi);
  }
  for (double x : w) {
    if (!std::isfinite(x)) throw NumericError("tilt: non-finite weight");
  }
  return Pmf::normalized(p.alphabet(), std::move(w));
}

ConditionalPmf conditional_tilt(const ConditionalPmf& c, double theta) {
  std::vector<std::pair<std::string, Pmf>> rows;
  rows.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) rows.emplace_back(c.given(i), tilt(c.row(i), theta));
  return ConditionalPmf(std::move(rows));
}

double shannon_entropy(const Pmf& p) {
  CompensatedSum h;
  for (double x : p.probs()) {
    if (x > 0.0) h.add(-x * std::log(x));
  }
  return h.value();
}

double renyi_entropy(const Pmf& p, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("renyi_entropy: order must be positive and finite");
  if (std::abs(alpha - 1.0) < 1e-9) return shannon_entropy(p);
  std::vector<double> terms;
  terms.reserve(p.size());
  for (double x : p.probs()) {
    if (x > 0.0) terms.push_back(alpha * std::log(x));
  }
  return log_sum_exp(terms) / (1.0 - alpha);
}

double kl_divergence(const Pmf& q, const Pmf& p) {
  require_same_alphabet(q, p, "kl_divergence");
  CompensatedSum d;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;
    if (p[i] <= 0.0) return kInf;
    d.add(q[i] * (std::log(q[i]) - std::log(p[i])));
  }
  return std::max(0.0, d.value());
}

double cross_entropy(const Pmf& q, const Pmf& p) {
  require_same_alphabet(q, p, "cross_entropy");
  CompensatedSum c;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;
    if (p[i] <= 0.0) return kInf;
    c.add(-q[i] * std::log(p[i]));
  }
  return c.value();
}

Pmf product_pmf(const Pmf& p, std::size_t n) {
  if (n == 0) throw DomainError("product_pmf: length must be >= 1");
  const std::size_t m = p.size();
  constexpr std::size_t kMaxSequences = 10'000'000;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > kMaxSequences / m) throw DomainError("product_pmf: more than 1e7 sequences");
    total *= m;
  }
  const bool short_symbols =
      std::all_of(p.symbols().begin(), p.symbols().end(), [](const std::string& s) { return s.size() == 1; });
  const std::string sep = short_symbols ? "" : ",";

  auto symbols = std::make_shared<Alphabet>();
  symbols->reserve(total);
  std::vector<double> probs;
  probs.reserve(total);
  std::vector<std::size_t> digits(n, 0);
  std::vector<std::size_t> sorted(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::string name;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) name += sep;
      name += p.symbol(digits[k]);
    }
    // Multiply in canonical (sorted) order so equal types give equal products.
    sorted = digits;
    std::sort(sorted.begin(), sorted.end());
    double prob = 1.0;
    for (std::size_t d : sorted) prob *= p[d];
    symbols->push_back(std::move(name));
    probs.push_back(prob);
    for (std::size_t k = n; k-- > 0;) {
      if (++digits[k] < m) break;
      digits[k] = 0;
    }
  }
  return Pmf::renormalized(std::move(symbols), std::move(probs));
}

double l1_distance(const Pmf& a, const Pmf& b) {
  require_same_alphabet(a, b, "l1_distance");
  CompensatedSum d;
  for (std::size_t i = 0; i < a.size(); ++i) d.add(std::abs(a[i] - b[i]));
  return d.value();
}

}  // namespace guesswork

namespace guesswork {

Pmf uniform_on_support(const Pmf& p) {
  std::vector<double> w(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) w[i] = p[i] > 0.0 ? 1.0 : 0.0;
  return Pmf::normalized(p.alphabet(), std::move(w));
}

Pmf uniform_on_mode(const Pmf& p) {
  const double top = *std::max_element(p.probs().begin(), p.probs().end());
  std::vector<double> w(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) w[i] = p[i] == top ? 1.0 : 0.0;
  return Pmf::normalized(p.alphabet(), std::move(w));
}

Pmf tilt_or_limit(const Pmf& p, double beta) {
  if (beta == 0.0) return uniform_on_support(p);
  return tilt(p, beta);
}

EntropyMatch entropy_matching_tilt(const Pmf& p, double target_nats, double beta_max, double tolerance) {
  if (!(beta_max > 0.0)) throw DomainError("entropy_matching_tilt: beta_max must be positive");
  const double h_max = std::log(static_cast<double>(p.support_size()));
  if (target_nats >= h_max) {
    Pmf u = uniform_on_support(p);
    return {0.0, u, std::abs(h_max - target_nats)};
  }
  Pmf at_max = tilt(p, beta_max);
  const double h_min = shannon_entropy(at_max);
  if (target_nats <= h_min) return {beta_max, at_max, std::abs(h_min - target_nats)};

  double lo = 0.0;  // H(lo) > target
  double hi = beta_max;  // H(hi) < target
  double mid = 0.5 * (lo + hi);
  Pmf q = tilt(p, mid);
  double h = shannon_entropy(q);
  for (int iter = 0; iter < 400; ++iter) {
    if (std::abs(h - target_nats) <= tolerance * 1e-2) break;
    if (h > target_nats) {
      lo = mid;
    } else {
      hi = mid;
    }
    const double next = 0.5 * (lo + hi);
    if (next == mid || next <= 0.0) break;
    mid = next;
    q = tilt(p, mid);
    h = shannon_entropy(q);
  }
  const double residual = std::abs(h - target_nats);
  if (residual > tolerance) {
    throw NumericError("entropy_matching_tilt: bisection stalled with residual " + std::to_string(residual));
  }
  return {mid, std::move(q), residual};
}

}  // namespace guesswork
