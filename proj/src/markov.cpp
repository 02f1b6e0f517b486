#include "guesswork/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "guesswork/errors.hpp"
#include "guesswork/numeric.hpp"

namespace guesswork {

namespace {

// One side of the power iteration: returns the eigenvalue of (W + sI) and
// the eigenvector normalized to unit 1-norm. `transpose` iterates x W.
struct PowerResult {
  double eigenvalue;
  std::vector<double> vector;
  std::size_t iterations;
};

PowerResult power_iterate(const SquareMatrix& w, double shift, bool transpose, double tolerance,
                          std::size_t max_iterations) {
  const std::size_t n = w.size();
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> y(n);
  double previous = -1.0;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      CompensatedSum acc;
      for (std::size_t j = 0; j < n; ++j) acc.add((transpose ? w(j, i) : w(i, j)) * x[j]);
      y[i] = acc.value() + shift * x[i];
    }
    double lo = kInf;
    double hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ratio = y[i] / x[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    const double norm = compensated_sum(y);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericError("perron: iteration diverged");
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    const double estimate = norm;  // ||(W + sI) x||_1 with ||x||_1 = 1
    const double scale = std::max(1.0, estimate);
    if (std::abs(estimate - previous) < tolerance * scale && hi - lo < tolerance * scale) {
      return {0.5 * (lo + hi), x, it};
    }
    previous = estimate;
  }
  throw NumericError("perron: power iteration did not converge");
}

}  // namespace

SquareMatrix SquareMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  SquareMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw DomainError("matrix is not square");
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

SquareMatrix SquareMatrix::identity(std::size_t n, double diagonal) {
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = diagonal;
  return m;
}

std::vector<std::vector<double>> SquareMatrix::to_rows() const {
  std::vector<std::vector<double>> rows(n_);
  for (std::size_t i = 0; i < n_; ++i) rows[i].assign(row(i).begin(), row(i).end());
  return rows;
}

bool is_irreducible(const SquareMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return false;
  auto reaches_all = [&](bool reverse) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < n; ++b) {
        const double entry = reverse ? m(b, a) : m(a, b);
        if (entry > 0.0 && !seen[b]) {
          seen[b] = true;
          stack.push_back(b);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
  };
  return reaches_all(false) && reaches_all(true);
}

PerronData perron(const SquareMatrix& w, double tolerance, std::size_t max_iterations) {
  const std::size_t n = w.size();
  if (n == 0) throw DomainError("perron: empty matrix");
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : w.row(i)) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("perron: matrix must be nonnegative and finite");
    }
  }
  if (!is_irreducible(w)) throw DomainError("perron: matrix is reducible");

  // The mean row sum lies between the Perron bounds min/max row sum.
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) total.add(compensated_sum(w.row(i)));
  const double shift = total.value() / static_cast<double>(n);

  const PowerResult right = power_iterate(w, shift, false, tolerance, max_iterations);
  const PowerResult left = power_iterate(w, shift, true, tolerance, max_iterations);

  PerronData out;
  out.lambda = 0.5 * (right.eigenvalue + left.eigenvalue) - shift;
  out.left = left.vector;  // already sums to 1
  const double dot = std::inner_product(out.left.begin(), out.left.end(), right.vector.begin(), 0.0);
  out.right.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.right[i] = right.vector[i] / dot;
  out.w = w;
  out.iterations = right.iterations + left.iterations;
  return out;
}

MarkovModel::MarkovModel(std::vector<std::string> states, SquareMatrix transitions)
    : transitions_(std::move(transitions)), stationary_(Pmf::point_mass(1, 0)) {
  const std::size_t n = transitions_.size();
  if (n == 0 || states.size() != n) throw DomainError("MarkovModel: state count does not match matrix size");
  for (std::size_t a = 0; a < n; ++a) {
    for (double v : transitions_.row(a)) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("MarkovModel: transitions must be finite and >= 0");
    }
    const double sum = compensated_sum(transitions_.row(a));
    if (std::abs(sum - 1.0) > kRowTolerance) {
      throw DomainError("MarkovModel: row " + std::to_string(a) + " sums to " + std::to_string(sum));
    }
  }
  if (!is_irreducible(transitions_)) throw DomainError("MarkovModel: chain is not irreducible");

  const PerronData pd = perron(transitions_);
  stationary_ = Pmf::normalized(std::make_shared<const Alphabet>(std::move(states)), pd.left);
  for (std::size_t b = 0; b < n; ++b) {
    CompensatedSum acc;
    for (std::size_t a = 0; a < n; ++a) acc.add(stationary_[a] * transitions_(a, b));
    if (std::abs(acc.value() - stationary_[b]) > kStationaryTolerance) {
      throw NumericError("MarkovModel: stationary distribution check failed");
    }
  }
}

MarkovModel MarkovModel::iid(const Pmf& p) {
  SquareMatrix u(p.size());
  for (std::size_t a = 0; a < p.size(); ++a) {
    for (std::size_t b = 0; b < p.size(); ++b) u(a, b) = p[b];
  }
  return MarkovModel(p.symbols(), std::move(u));
}

Pmf MarkovModel::row(std::size_t a) const {
  const auto r = transitions_.row(a);
  return Pmf::renormalized(stationary_.alphabet(), std::vector<double>(r.begin(), r.end()));
}

double MarkovModel::sequence_probability(std::span<const std::size_t> seq) const {
  if (seq.empty()) return 1.0;
  double prob = stationary_[seq[0]];
  for (std::size_t i = 1; i < seq.size(); ++i) prob *= transitions_(seq[i - 1], seq[i]);
  return prob;
}

PerronData tilted_perron(const MarkovModel& source, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("tilted_perron: rho must be positive");
  const double theta = 1.0 / (1.0 + rho);
  const std::size_t n = source.size();
  SquareMatrix w(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double u = source.transitions()(a, b);
      w(a, b) = u > 0.0 ? std::pow(u, theta) : 0.0;
    }
  }
  return perron(w);
}

MarkovModel optimal_markov_guesser(const MarkovModel& source, double rho) {
  const PerronData pd = tilted_perron(source, rho);
  const std::size_t n = source.size();
  SquareMatrix guesser(n);
  for (std::size_t a = 0; a < n; ++a) {
    CompensatedSum row_sum;
    for (std::size_t b = 0; b < n; ++b) {
      guesser(a, b) = pd.w(a, b) * pd.right[b] / (pd.lambda * pd.right[a]);
      row_sum.add(guesser(a, b));
    }
    const double s = row_sum.value();
    if (std::abs(s - 1.0) > Pmf::kRenormalizeTolerance) {
      throw NumericError("optimal_markov_guesser: row " + std::to_string(a) + " sums to " + std::to_string(s));
    }
    for (std::size_t b = 0; b < n; ++b) guesser(a, b) /= s;
  }
  return MarkovModel(source.states(), std::move(guesser));
}

double markov_sync_exponent(const MarkovModel& source, double rho) {
  // Reducing to an i.i.d. source (identical rows) gives lambda = sum p^{1/(1+rho)},
  // so the coefficient consistent with rho H_{1/(1+rho)} is (1 + rho).
  return (1.0 + rho) * std::log(tilted_perron(source, rho).lambda);
}

}  // namespace guesswork
