#include "guesswork/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "guesswork/errors.hpp"
#include "guesswork/numeric.hpp"

namespace guesswork {

namespace {

constexpr double kAlphaSlack = 1e-12;

void check_alpha(const Pmf& p, double alpha, const char* who) {
  const double cap = std::log(static_cast<double>(p.size()));
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > cap + kAlphaSlack) {
    throw DomainError(std::string(who) + ": alpha must lie in [0, log|X|] = [0, " + std::to_string(cap) +
                      "], got " + std::to_string(alpha));
  }
}

std::size_t mode_count(const Pmf& p) {
  const auto probs = p.probs();
  const double top = *std::max_element(probs.begin(), probs.end());
  return static_cast<std::size_t>(std::count(probs.begin(), probs.end(), top));
}

struct Threshold {
  Pmf type;
  std::optional<double> tilt;  // absent when the type lives on the mode face
  double residual = 0.0;
};

// When alpha <= log(#modes) every cross-entropy minimizer sits on the modes;
// pick (1-t) uniform + t point mass on the first mode with entropy alpha.
Threshold mode_face_threshold(const Pmf& p, double alpha) {
  const auto probs = p.probs();
  const double top = *std::max_element(probs.begin(), probs.end());
  std::vector<std::size_t> modes;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] == top) modes.push_back(i);
  }
  const double k = static_cast<double>(modes.size());
  auto mix = [&](double t) {
    std::vector<double> w(probs.size(), 0.0);
    for (std::size_t i : modes) w[i] = (1.0 - t) / k;
    w[modes.front()] += t;
    return p.with_probs(std::move(w));
  };
  if (alpha >= std::log(k)) return {mix(0.0), std::nullopt, std::abs(std::log(k) - alpha)};
  if (alpha <= 0.0) return {mix(1.0), std::nullopt, 0.0};
  double lo = 0.0;  // entropy above alpha
  double hi = 1.0;  // entropy below alpha
  for (int iter = 0; iter < 200 && hi - lo > 1e-16; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (shannon_entropy(mix(mid)) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Pmf q = mix(0.5 * (lo + hi));
  const double residual = std::abs(shannon_entropy(q) - alpha);
  return {std::move(q), std::nullopt, residual};
}

Threshold compute_threshold(const Pmf& p, double alpha) {
  if (alpha <= std::log(static_cast<double>(mode_count(p)))) return mode_face_threshold(p, alpha);
  double beta_max = 50.0;
  while (beta_max < 1e8 && shannon_entropy(tilt(p, beta_max)) > alpha) beta_max *= 4.0;
  EntropyMatch m = entropy_matching_tilt(p, alpha, beta_max);
  return {std::move(m.distribution), m.beta, m.residual};
}

// Bisection for tau in [lo, hi] with f(tau) = target, f non-increasing.
double bisect_decreasing(auto&& f, double target, double lo, double hi) {
  for (int iter = 0; iter < 300; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ListGrowthRate ListGrowthRate::from_nats(double alpha, std::size_t alphabet_size) {
  if (alphabet_size < 1) throw DomainError("ListGrowthRate: empty alphabet");
  const double cap = std::log(static_cast<double>(alphabet_size));
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > cap + kAlphaSlack) {
    throw DomainError("ListGrowthRate: alpha must lie in [0, log|X|], got " + std::to_string(alpha));
  }
  return ListGrowthRate(std::min(alpha, cap), alphabet_size);
}

ListGrowthRate ListGrowthRate::from_base_exponent(double a, std::size_t alphabet_size) {
  if (!std::isfinite(a) || a < 0.0 || a > 1.0) {
    throw DomainError("ListGrowthRate: list size exponent must lie in [0, 1], got " + std::to_string(a));
  }
  return from_nats(a * std::log(static_cast<double>(alphabet_size)), alphabet_size);
}

std::string_view to_string(ExponentSolver solver) {
  switch (solver) {
    case ExponentSolver::kTiltedBisection:
      return "tilted-bisection";
    case ExponentSolver::kSimplexGrid:
      return "simplex-grid";
  }
  return "unknown";
}

Pmf threshold_type(const Pmf& p, double alpha) {
  check_alpha(p, alpha, "threshold_type");
  return compute_threshold(p, alpha).type;
}

bool in_guess_list(const Pmf& q, const Pmf& p, double alpha) {
  if (!q.same_alphabet(p)) throw InputError("in_guess_list: q and p use different alphabets");
  check_alpha(p, alpha, "in_guess_list");
  const Pmf star = compute_threshold(p, alpha).type;
  return cross_entropy(q, p) < cross_entropy(star, p);
}

ExponentReport sync_success_exponent(const Pmf& p, double alpha) {
  check_alpha(p, alpha, "sync_success_exponent");
  if (alpha >= shannon_entropy(p)) {
    return {0.0, p, ExponentSolver::kTiltedBisection, 0.0, 1.0, std::nullopt};
  }
  Threshold t = compute_threshold(p, alpha);
  const double value = std::max(0.0, kl_divergence(t.type, p));
  return {value, std::move(t.type), ExponentSolver::kTiltedBisection, t.residual, t.tilt, std::nullopt};
}

double async_objective(const Pmf& q, const Pmf& p, double alpha, double beta) {
  const Pmf g = tilt_or_limit(p, beta);
  const double d = kl_divergence(q, p);
  if (!std::isfinite(d)) return kInf;
  return d + std::max(0.0, cross_entropy(q, g) - alpha);
}

ExponentReport async_success_exponent(const Pmf& p, double alpha, double beta, AsyncDomain domain) {
  check_alpha(p, alpha, "async_success_exponent");
  if (!std::isfinite(beta) || beta < 0.0) {
    throw DomainError("async_success_exponent: beta must be finite and >= 0, got " + std::to_string(beta));
  }
  const Pmf g = tilt_or_limit(p, beta);
  auto family = [&](double tau) { return tilt_or_limit(p, tau); };
  auto list_cost = [&](double tau) { return cross_entropy(family(tau), g); };
  auto finish = [&](double tau, Pmf q, double residual) {
    const double value = std::max(0.0, kl_divergence(q, p)) + std::max(0.0, cross_entropy(q, g) - alpha);
    return ExponentReport{value, std::move(q), ExponentSolver::kTiltedBisection, residual, tau, beta};
  };

  // Unconstrained minimizer over the simplex: the cost along the family
  // tau -> p^tau is non-increasing, so the kink of [.]_+ is found by bisection.
  double tau_u = 1.0;
  double residual = 0.0;
  if (list_cost(1.0) > alpha) {
    const double top = 1.0 + beta;
    if (list_cost(top) >= alpha) {
      tau_u = top;
    } else {
      tau_u = bisect_decreasing(list_cost, alpha, 1.0, top);
      residual = std::abs(list_cost(tau_u) - alpha);
    }
  }
  if (domain == AsyncDomain::kFullSimplex) return finish(tau_u, family(tau_u), residual);

  Threshold t = compute_threshold(p, alpha);
  if (!t.tilt) {
    // Closure of the list type set is the mode face; the objective there is
    // minimized by the uniform distribution over the modes.
    Pmf q = uniform_on_mode(p);
    ExponentReport r = finish(0.0, std::move(q), t.residual);
    r.type_tilt.reset();
    return r;
  }
  if (*t.tilt > tau_u) return finish(*t.tilt, family(*t.tilt), t.residual);
  return finish(tau_u, family(tau_u), residual);
}

ExponentReport min_beta_async_exponent(const Pmf& p, double alpha, double beta_max) {
  check_alpha(p, alpha, "min_beta_async_exponent");
  if (!std::isfinite(beta_max) || beta_max <= 0.0) {
    throw DomainError("min_beta_async_exponent: beta_max must be positive and finite");
  }
  constexpr int kGrid = 500;
  auto f = [&](double beta) { return async_success_exponent(p, alpha, beta).value; };

  std::size_t best = 0;
  double best_value = kInf;
  std::vector<double> grid(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) {
    grid[i] = beta_max * i / kGrid;
    const double v = f(grid[i]);
    if (v < best_value) {
      best_value = v;
      best = static_cast<std::size_t>(i);
    }
  }
  double best_beta = grid[best];

  // Golden-section refinement on the neighbouring grid cells.
  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min<std::size_t>(best + 1, kGrid)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 200 && b - a > 1e-12; ++iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double refined = fc <= fd ? c : d;
  if (std::min(fc, fd) < best_value) best_beta = refined;

  ExponentReport r = async_success_exponent(p, alpha, best_beta);
  r.guesser_tilt = best_beta;
  return r;
}

ExponentReport failure_exponent(const Pmf& p, double alpha) {
  check_alpha(p, alpha, "failure_exponent");
  if (alpha >= std::log(static_cast<double>(p.support_size())) - kAlphaSlack) {
    return {kInf, uniform_on_support(p), ExponentSolver::kTiltedBisection, 0.0, 0.0, std::nullopt};
  }
  if (alpha <= shannon_entropy(p)) {
    return {0.0, p, ExponentSolver::kTiltedBisection, 0.0, 1.0, std::nullopt};
  }
  Threshold t = compute_threshold(p, alpha);
  const double value = std::max(0.0, kl_divergence(t.type, p));
  return {value, std::move(t.type), ExponentSolver::kTiltedBisection, t.residual, t.tilt, std::nullopt};
}

}  // namespace guesswork
