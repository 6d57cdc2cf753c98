#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blurreg/rational.hpp"
#include "blurreg/signal.hpp"

namespace blurreg {

/// Symmetric two-point noise: every sample is perturbed by +x or -x.
struct NoiseSpec {
  Q256 magnitude;
  /// One entry per sample, each +1 or -1.
  std::vector<int> signs;

  /// Equiprobable signs drawn from a seeded generator.
  static NoiseSpec from_seed(Q256 magnitude, int count, std::uint64_t seed);

  void validate(std::size_t count) const;
};

QuantizedSequence apply_noise(const QuantizedSequence& gamma, const NoiseSpec& spec);

/// d[i] = y[i] - y[i-1] with y[-1] = 0.
std::vector<Q256> difference_sequence(const QuantizedSequence& y);

/// Inverse of difference_sequence.
QuantizedSequence prefix_sum(const std::vector<Q256>& d);

/// r[k] = sum_i y1[i] y2[i+k] for k in [-(n1-1), n2-1], sequences zero
/// outside their range.
template <typename T>
struct Correlation {
  int min_lag = 0;
  std::vector<T> values;

  int max_lag() const { return min_lag + static_cast<int>(values.size()) - 1; }
  const T& at(int lag) const { return values.at(static_cast<std::size_t>(lag - min_lag)); }
};

/// Exact correlation on the 1/256 grid; values are numerators over 256^2.
Correlation<std::int64_t> cross_correlation(const QuantizedSequence& y1,
                                            const QuantizedSequence& y2);

/// Same correlation for arbitrary rational sequences.
Correlation<Rational> cross_correlation(const std::vector<Rational>& y1,
                                        const std::vector<Rational>& y2);

struct ArgmaxResult {
  int lag = 0;
  /// Every lag attaining the maximum, in tie-break order.
  std::vector<int> tied;
};

/// Ties go to the smallest |lag|, then to the negative lag.
template <typename T>
ArgmaxResult ccorr_argmax(const Correlation<T>& r);

/// CSV "lag,numerator,denominator" with reduced fractions.
std::string correlation_to_csv(const Correlation<std::int64_t>& r);

}  // namespace blurreg
