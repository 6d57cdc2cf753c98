#pragma once

#include <functional>

namespace blurreg {

/// Standard normal CDF. Built on std::erfc, which keeps the absolute error
/// well under 1e-15 across the whole real line (no cancellation in the
/// lower tail).
double normal_cdf(double z);

/// Inverse of normal_cdf on (0, 1): bracketing bisection followed by
/// safeguarded Newton steps. Absolute error below 1e-12 for p in
/// [1e-300, 1 - 1e-16].
double normal_quantile(double p);

/// Inverse of an arbitrary nondecreasing CDF by bisection on [lo, hi].
double invert_monotone(const std::function<double(double)>& cdf, double p, double lo, double hi,
                       double tolerance = 1e-13);

/// CDF hook used by the sampling routines, so tests can inject a degraded
/// approximation.
using CdfFunction = double (*)(double);

}  // namespace blurreg
