#pragma once

#include <stdexcept>
#include <string>

namespace guesswork {

// Malformed user-supplied data (files, configs, flags). The CLI maps this to
// exit code 2; every other exception maps to exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Overflow, non-convergence, or a result that is not a finite number.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A simulated attack that can never reach its target.
class NonTerminationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace guesswork
