#pragma once

#include <cstddef>
#include <span>

namespace windclime {

/**
 * Regularized incomplete beta function I_x(a, b) for x in [0, 1], a > 0,
 * b > 0, evaluated by the continued-fraction expansion.
 */
double regularized_incomplete_beta(double x, double a, double b);

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;  // denominator chosen by caller, see helpers below
  std::size_t count = 0;
};

/// Mean and sample variance (n-1 denominator). NaN entries are skipped.
MeanVar sample_mean_variance(std::span<const double> values);

/// Mean and population variance (n denominator). NaN entries are skipped.
MeanVar population_mean_variance(std::span<const double> values);

}  // namespace windclime
