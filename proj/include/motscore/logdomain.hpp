#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace motscore {

// Log-domain arithmetic on extended reals. Probabilities and densities are
// kept as natural logs end to end; a probability of exactly zero is the
// log-domain value -inf ("log-zero"), which is an ordinary value here, not a
// fault. NaN is rejected at every construction boundary, so doubles with
// +/-inf are totally ordered.

inline constexpr double log_zero = -std::numeric_limits<double>::infinity();

inline bool is_log_zero(double x) { return x == log_zero; }

// log(exp(a) + exp(b)), exact for log-zero operands.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (is_log_zero(b)) return a;  // covers both operands log-zero
  return a + std::log1p(std::exp(b - a));
}

// log sum exp of a sequence; log-zero for an empty or all-log-zero input.
inline double log_sum_exp(std::span<const double> vals) {
  double max = log_zero;
  for (double v : vals) max = std::max(max, v);
  if (is_log_zero(max)) return log_zero;
  double sum = 0.0;
  for (double v : vals) {
    if (!is_log_zero(v)) sum += std::exp(v - max);
  }
  return max + std::log(sum);
}

}  // namespace motscore
