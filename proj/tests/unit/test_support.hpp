#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "guesswork/pmf.hpp"

namespace gwtest {

// Random PMF with every probability positive (exponential weights).
inline guesswork::Pmf random_pmf(std::mt19937_64& rng, std::size_t m) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(m);
  for (auto& x : w) x = e(rng) + 1e-3;
  return guesswork::Pmf::normalized(guesswork::indexed_alphabet(m), w);
}

// Direct, unoptimized evaluations used as references.
inline double entropy_direct(const std::vector<double>& q) {
  long double s = 0;
  for (double x : q) {
    if (x > 0) s -= static_cast<long double>(x) * std::log(static_cast<long double>(x));
  }
  return static_cast<double>(s);
}

inline double kl_direct(const std::vector<double>& q, const std::vector<double>& p) {
  long double s = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0) continue;
    if (p[i] == 0) return INFINITY;
    s += static_cast<long double>(q[i]) * std::log(static_cast<long double>(q[i]) / p[i]);
  }
  return static_cast<double>(s);
}

inline double cross_entropy_direct(const std::vector<double>& q, const std::vector<double>& p) {
  long double s = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0) continue;
    if (p[i] == 0) return INFINITY;
    s -= static_cast<long double>(q[i]) * std::log(static_cast<long double>(p[i]));
  }
  return static_cast<double>(s);
}

inline std::vector<double> to_vec(const guesswork::Pmf& p) { return {p.probs().begin(), p.probs().end()}; }

}  // namespace gwtest
