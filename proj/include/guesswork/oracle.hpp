#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "guesswork/pmf.hpp"

namespace guesswork {

enum class OracleMethod { kExhaustiveEnumeration, kGridMinimization, kInterleavingSearch, kTruncatedSeries };
std::string_view to_string(OracleMethod method);

struct OracleResult {
  double value = 0.0;  // may be +infinity
  OracleMethod method = OracleMethod::kExhaustiveEnumeration;
  std::uint64_t work = 0;       // sequences, grid points, states or series terms visited
  std::vector<double> argmin;   // grid minimization only
};

inline constexpr std::uint64_t kExhaustiveCap = 10'000'000;
inline constexpr std::size_t kInterleavingCap = 12;

/// E[G*^rho] over p^n by listing every sequence, sorting by probability
/// (ties: lexicographic) and summing rank^rho * prob.
OracleResult exhaustive_guesswork(const Pmf& p, std::size_t n, double rho);

using SimplexObjective = std::function<double(std::span<const double>)>;

/// Minimum of `objective` over the grid {k * step} on the probability simplex
/// of dimension 2 (step <= 1e-6) or 3 (step <= 1e-3). Infeasible points may
/// return +infinity. Ties go to the smallest grid index.
OracleResult simplex_grid_min(const SimplexObjective& objective, std::size_t alphabet_size, double step);

/// Largest first-hit position over every interleaving of the agents' finite
/// query lists. +infinity when no list contains the target.
OracleResult interleaving_search(const std::vector<std::vector<std::uint64_t>>& lists, std::uint64_t target);

/// sum_k k^rho (1-q)^{k-1} q accumulated term by term until the tail bound
/// drops below tail_eps times the running sum.
OracleResult truncated_series_moment(double p_hit, double rho, double tail_eps = 1e-12);

}  // namespace guesswork
