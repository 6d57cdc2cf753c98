#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "blurreg/normal.hpp"
#include "blurreg/rational.hpp"

namespace blurreg {

/// Default magnitude bound on amplitudes: 256 in signal units.
inline constexpr Q256 kDefaultAmplitudeBound = Q256::from_int(256);

/// Piecewise constant signal with support starting at zero.
///
/// Region j (1-based, j = 1..m) has amplitude g_j on [D_{j-1}, D_j).
/// Outside the support the signal is zero, so g_0 = g_{m+1} = 0. All
/// positions are in units of the sampling interval T.
class PiecewiseConstantSignal {
 public:
  /// `discontinuities` holds D_0..D_m; D_0 must be 0.
  PiecewiseConstantSignal(std::vector<Q256> amplitudes, std::vector<double> discontinuities,
                          Q256 amplitude_bound = kDefaultAmplitudeBound);

  /// Number of regions in the support.
  int regions() const { return static_cast<int>(amplitudes_.size()); }

  /// g_j for j = 0..m+1, with the implicit zero levels at both ends.
  Q256 level(int j) const;

  /// g_{j+1} - g_j for j = 0..m.
  Q256 step(int j) const { return level(j + 1) - level(j); }

  /// D_j for j = 0..m.
  double discontinuity(int j) const { return discontinuities_.at(static_cast<std::size_t>(j)); }

  const std::vector<Q256>& amplitudes() const { return amplitudes_; }
  const std::vector<double>& discontinuities() const { return discontinuities_; }

  /// Smallest D_{j+1} - D_j.
  double min_spacing() const;

  Q256 max_abs_step() const;

 private:
  std::vector<Q256> amplitudes_;
  std::vector<double> discontinuities_;
};

struct BlurComponent {
  Rational weight;
  double sigma;
};

/// Gaussian blur or a finite mixture of Gaussians. Weights are exact
/// rationals summing to one.
class BlurModel {
 public:
  explicit BlurModel(std::vector<BlurComponent> components);

  static BlurModel gaussian(double sigma) { return BlurModel({{Rational(1), sigma}}); }

  const std::vector<BlurComponent>& components() const { return components_; }
  double max_sigma() const;
  bool is_pure() const { return components_.size() == 1; }

  /// Mixture CDF of a unit step blurred by this model, evaluated at offset z.
  double step_response(double z, CdfFunction cdf = normal_cdf) const;

 private:
  std::vector<BlurComponent> components_;
};

/// Uniform sampling grid t0 + i, i = 0..N-1 (T normalized to 1).
struct SamplingGrid {
  double t0 = -0.5;
  int count = 0;

  double time(int i) const { return t0 + static_cast<double>(i); }

  /// Throws ValidationError if the grid does not straddle the support,
  /// lands exactly on a discontinuity, or the signal has two
  /// discontinuities an integer number of samples apart.
  void validate(const PiecewiseConstantSignal& signal) const;
};

using QuantizedSequence = std::vector<Q256>;

/// Sample counts per region: eta[0] before D_0, eta[j] in (D_{j-1}, D_j),
/// eta[m+1] after D_m. iota[j] = eta[0] + ... + eta[j] is the index of the
/// first sample after D_j.
struct RegionCounts {
  std::vector<int> eta;
  std::vector<int> iota;
};

Q256 eval_signal(const PiecewiseConstantSignal& signal, double t);

double eval_blurred(const PiecewiseConstantSignal& signal, const BlurModel& blur, double t,
                    CdfFunction cdf = normal_cdf);

/// Nearest multiple of 1/256; exact halfway cases round to even.
Q256 quantize(double value);

QuantizedSequence sample_sequence(const PiecewiseConstantSignal& signal, const BlurModel& blur,
                                  const SamplingGrid& grid, CdfFunction cdf = normal_cdf);

/// g_D = (g_1 - g_0, ..., g_{m+1} - g_m).
std::vector<Q256> difference_vector(const PiecewiseConstantSignal& signal);

RegionCounts region_counts(const PiecewiseConstantSignal& signal, const SamplingGrid& grid);

}  // namespace blurreg
