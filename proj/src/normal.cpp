#include "blurreg/normal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace blurreg {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  // 1 - p is exact here, and the lower tail is the well-conditioned side.
  if (p > 0.5) return -normal_quantile(1.0 - p);

  double lo = -40.0;
  double hi = 40.0;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  double z = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double f = normal_cdf(z) - p;
    if (f == 0.0) break;
    (f < 0.0 ? lo : hi) = z;
    const double slope = normal_pdf(z);
    double next = slope > 0.0 ? z - f / slope : 0.5 * (lo + hi);
    // Stay inside the bracket; fall back to bisection if Newton overshoots.
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool converged = std::abs(next - z) <= 1e-15 * (1.0 + std::abs(z));
    z = next;
    if (converged) break;
  }
  return z;
}

double invert_monotone(const std::function<double(double)>& cdf, double p, double lo, double hi,
                       double tolerance) {
  for (int iter = 0; iter < 400 && hi - lo > tolerance; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace blurreg
