#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "guesswork/pmf.hpp"

namespace guesswork {

/// Dense row-major square matrix.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
  static SquareMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static SquareMatrix identity(std::size_t n, double diagonal = 1.0);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::vector<std::vector<double>> to_rows() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Strong connectivity of the directed graph of positive entries.
bool is_irreducible(const SquareMatrix& m);

struct PerronData {
  double lambda = 0.0;
  std::vector<double> left;   // l W = lambda l, sum l = 1
  std::vector<double> right;  // W r = lambda r, l . r = 1
  SquareMatrix w;
  std::size_t iterations = 0;
};

/// Perron-Frobenius eigen-triple of a nonnegative irreducible matrix by power
/// iteration on W + sI (the shift makes periodic matrices primitive).
/// Iterates until successive eigenvalue estimates differ by less than
/// `tolerance` (relative) and the Collatz-Wielandt bounds agree to the same
/// tolerance. Throws DomainError for reducible input and NumericError after
/// max_iterations.
PerronData perron(const SquareMatrix& w, double tolerance = 1e-12, std::size_t max_iterations = 1'000'000);

/// Irreducible stationary Markov chain over an ordered state alphabet.
class MarkovModel {
 public:
  static constexpr double kRowTolerance = 1e-12;
  static constexpr double kStationaryTolerance = 1e-10;

  MarkovModel(std::vector<std::string> states, SquareMatrix transitions);

  /// Every row equal to p: the i.i.d. source p viewed as a chain.
  static MarkovModel iid(const Pmf& p);

  std::size_t size() const { return transitions_.size(); }
  const Alphabet& states() const { return stationary_.symbols(); }
  const SquareMatrix& transitions() const { return transitions_; }
  const Pmf& stationary() const { return stationary_; }
  /// Transition row of state a as a Pmf over the states.
  Pmf row(std::size_t a) const;

  /// gamma_{x1} prod_i U_{x_i x_{i+1}}.
  double sequence_probability(std::span<const std::size_t> states) const;

 private:
  SquareMatrix transitions_;
  Pmf stationary_;
};

/// W_ab = U_ab^{1/(1+rho)} and its Perron data.
PerronData tilted_perron(const MarkovModel& source, double rho);

/// Guessing chain with transitions W_ab r_b / (lambda r_a); its own
/// stationary distribution is used for the first guessed symbol.
MarkovModel optimal_markov_guesser(const MarkovModel& source, double rho);

/// (1 + rho) log lambda, nats per symbol.
double markov_sync_exponent(const MarkovModel& source, double rho);

}  // namespace guesswork
