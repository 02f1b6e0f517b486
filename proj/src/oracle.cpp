#include "guesswork/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "guesswork/errors.hpp"
#include "guesswork/numeric.hpp"

namespace guesswork {

std::string_view to_string(OracleMethod method) {
  switch (method) {
    case OracleMethod::kExhaustiveEnumeration:
      return "exhaustive-enumeration";
    case OracleMethod::kGridMinimization:
      return "grid-minimization";
    case OracleMethod::kInterleavingSearch:
      return "interleaving-search";
    case OracleMethod::kTruncatedSeries:
      return "truncated-series";
  }
  return "unknown";
}

OracleResult exhaustive_guesswork(const Pmf& p, std::size_t n, double rho) {
  if (n == 0) throw DomainError("exhaustive_guesswork: n must be >= 1");
  const std::size_t m = p.size();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > kExhaustiveCap / m) {
      throw DomainError("exhaustive_guesswork: |X|^n exceeds " + std::to_string(kExhaustiveCap));
    }
    total *= m;
  }

  // Probability from symbol counts so equal types get equal values.
  std::vector<std::pair<double, std::uint64_t>> seqs;
  seqs.reserve(total);
  std::vector<std::size_t> digits(n, 0);
  std::vector<std::size_t> counts(m, 0);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t pos = 0; pos < n; ++pos) {
      ++counts[c % m];
      c /= m;
    }
    double prob = 1.0;
    for (std::size_t s = 0; s < m; ++s) {
      for (std::size_t k = 0; k < counts[s]; ++k) prob *= p[s];
    }
    seqs.emplace_back(prob, code);
  }
  std::sort(seqs.begin(), seqs.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  CompensatedSum sum;
  for (std::uint64_t r = 0; r < total; ++r) {
    if (seqs[r].first == 0.0) continue;
    sum += std::pow(static_cast<double>(r + 1), rho) * seqs[r].first;
  }
  return {sum.value(), OracleMethod::kExhaustiveEnumeration, total, {}};
}

OracleResult simplex_grid_min(const SimplexObjective& objective, std::size_t alphabet_size, double step) {
  if (alphabet_size == 2) {
    if (!(step > 0.0) || step > 1e-6 + 1e-18) throw DomainError("simplex_grid_min: binary step must be <= 1e-6");
  } else if (alphabet_size == 3) {
    if (!(step > 0.0) || step > 1e-3 + 1e-15) throw DomainError("simplex_grid_min: ternary step must be <= 1e-3");
  } else {
    throw DomainError("simplex_grid_min: alphabet size must be 2 or 3");
  }
  const auto cells = static_cast<std::uint64_t>(std::ceil(1.0 / step - 1e-9));
  const double h = 1.0 / static_cast<double>(cells);
  OracleResult best{kInf, OracleMethod::kGridMinimization, 0, {}};
  std::vector<double> q(alphabet_size);
  auto consider = [&] {
    ++best.work;
    const double v = objective(q);
    if (v < best.value) {
      best.value = v;
      best.argmin = q;
    }
  };
  if (alphabet_size == 2) {
    for (std::uint64_t i = 0; i <= cells; ++i) {
      q[0] = static_cast<double>(i) * h;
      q[1] = static_cast<double>(cells - i) * h;
      consider();
    }
  } else {
    for (std::uint64_t i = 0; i <= cells; ++i) {
      for (std::uint64_t j = 0; i + j <= cells; ++j) {
        q[0] = static_cast<double>(i) * h;
        q[1] = static_cast<double>(j) * h;
        q[2] = static_cast<double>(cells - i - j) * h;
        consider();
      }
    }
  }
  if (best.argmin.empty()) best.argmin.assign(alphabet_size, 0.0);
  return best;
}

OracleResult interleaving_search(const std::vector<std::vector<std::uint64_t>>& lists, std::uint64_t target) {
  std::size_t total = 0;
  for (const auto& l : lists) total += l.size();
  if (total > kInterleavingCap) {
    throw DomainError("interleaving_search: total prefix length " + std::to_string(total) + " exceeds " +
                      std::to_string(kInterleavingCap));
  }
  const bool covered = std::any_of(lists.begin(), lists.end(), [&](const auto& l) {
    return std::find(l.begin(), l.end(), target) != l.end();
  });
  if (!covered) return {kInf, OracleMethod::kInterleavingSearch, 0, {}};

  // State = how many items each agent has delivered, packed mixed-radix.
  std::vector<std::uint64_t> radix(lists.size(), 1);
  for (std::size_t a = 1; a < lists.size(); ++a) radix[a] = radix[a - 1] * (lists[a - 1].size() + 1);
  std::unordered_map<std::uint64_t, long> memo;
  std::vector<std::size_t> pos(lists.size(), 0);
  std::uint64_t work = 0;

  // Longest delivery count from this state until (and including) the first
  // hit; -1 if the remaining items can no longer hit.
  auto longest = [&](auto&& self, std::uint64_t key) -> long {
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    ++work;
    long best = -1;
    for (std::size_t a = 0; a < lists.size(); ++a) {
      if (pos[a] == lists[a].size()) continue;
      if (lists[a][pos[a]] == target) {
        best = std::max(best, 1L);
        continue;
      }
      ++pos[a];
      const long rest = self(self, key + radix[a]);
      --pos[a];
      if (rest > 0) best = std::max(best, rest + 1);
    }
    memo.emplace(key, best);
    return best;
  };
  const long value = longest(longest, 0);
  return {static_cast<double>(value), OracleMethod::kInterleavingSearch, work, {}};
}

OracleResult truncated_series_moment(double p_hit, double rho, double tail_eps) {
  if (!(p_hit > 0.0 && p_hit <= 1.0)) throw DomainError("truncated_series_moment: p_hit must lie in (0, 1]");
  if (!(rho > 0.0)) throw DomainError("truncated_series_moment: rho must be positive");
  if (p_hit == 1.0) return {1.0, OracleMethod::kTruncatedSeries, 1, {}};
  const double miss = 1.0 - p_hit;
  double survival = 1.0;  // (1-q)^{k-1}
  CompensatedSum sum;
  std::uint64_t k = 1;
  constexpr std::uint64_t kMaxTerms = 4'000'000'000ULL;
  for (;; ++k) {
    const double kd = static_cast<double>(k);
    const double term = std::pow(kd, rho) * survival * p_hit;
    sum += term;
    // Past the mode of k^rho (1-q)^k the term ratio decreases, so the
    // tail is below term * r / (1 - r).
    const double ratio = std::pow((kd + 1.0) / kd, rho) * miss;
    if (ratio < 1.0 && kd > rho / p_hit) {
      const double tail = term * ratio / (1.0 - ratio);
      if (tail <= tail_eps * sum.value()) break;
    }
    if (k >= kMaxTerms) throw NumericError("truncated_series_moment: series did not converge");
    survival *= miss;
  }
  return {sum.value(), OracleMethod::kTruncatedSeries, k, {}};
}

}  // namespace guesswork
