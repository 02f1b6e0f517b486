#include "guesswork/numeric.hpp"

#include <algorithm>

namespace guesswork {

double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

double log_sum_exp(std::span<const double> xs) {
  double hi = -kInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == -kInf) return -kInf;
  if (hi == kInf) return kInf;
  CompensatedSum s;
  for (double x : xs) {
    if (x != -kInf) s.add(std::exp(x - hi));
  }
  return hi + std::log(s.value());
}

}  // namespace guesswork
