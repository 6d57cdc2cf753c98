#pragma once

// Random in-regime scenarios for the property suites.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "blurreg/alignment.hpp"
#include "blurreg/baseline.hpp"
#include "blurreg/error.hpp"
#include "blurreg/matrices.hpp"
#include "blurreg/signal.hpp"

namespace gen {

using namespace blurreg;

struct Scenario {
  PiecewiseConstantSignal signal{{Q256::from_int(1)}, {0.0, 3.5}};
  BlurModel blur = BlurModel::gaussian(0.1);
  std::vector<SamplingGrid> grids;
};

struct Options {
  int max_regions = 5;
  double min_spacing = 2.05;
  double max_spacing = 4.0;
  /// Amplitude numerators are multiples of this, within +-max_amplitude.
  int amplitude_quantum = 16;
  int max_amplitude = 512;
  bool allow_mixture = true;
  int grids = 1;
  int max_samples = 40;
};

inline std::vector<Q256> random_amplitudes(std::mt19937_64& rng, int m, const Options& o) {
  const int steps = o.max_amplitude / o.amplitude_quantum;
  std::uniform_int_distribution<int> pick(-steps, steps);
  std::vector<Q256> a;
  while (static_cast<int>(a.size()) < m) {
    const int k = pick(rng);
    const bool end = a.empty() || static_cast<int>(a.size()) == m - 1;
    if (end && k == 0) continue;
    if (!a.empty() && a.back() == Q256(k * o.amplitude_quantum)) continue;
    a.emplace_back(k * o.amplitude_quantum);
  }
  return a;
}

/// Blur safely inside the small-blur bound for `signal`.
inline BlurModel random_blur(std::mt19937_64& rng, const PiecewiseConstantSignal& signal,
                             bool allow_mixture) {
  Q256 biggest(0);
  for (int j = 0; j <= signal.regions(); ++j) biggest = std::max(biggest, abs(signal.step(j)));
  const double bound = 0.5 / nu_threshold(biggest);
  std::uniform_real_distribution<double> frac(0.3, 0.95);
  std::bernoulli_distribution mix(0.3);
  if (allow_mixture && mix(rng)) {
    std::uniform_int_distribution<int> w(1, 63);
    const int k = w(rng);
    return BlurModel({{Rational(k, 64), frac(rng) * bound}, {Rational(64 - k, 64), frac(rng) * bound}});
  }
  return BlurModel::gaussian(frac(rng) * bound);
}

/// A scenario that passes grid validation; grids share N when there are two.
inline Scenario random_scenario(std::mt19937_64& rng, const Options& o = {}) {
  for (;;) {
    std::uniform_int_distribution<int> regions(1, o.max_regions);
    const int m = regions(rng);
    std::uniform_real_distribution<double> gap(o.min_spacing, o.max_spacing);
    std::vector<double> d = {0.0};
    for (int j = 0; j < m; ++j) d.push_back(d.back() + gap(rng));
    Scenario s;
    s.signal = PiecewiseConstantSignal(random_amplitudes(rng, m, o), d);
    s.blur = random_blur(rng, s.signal, o.allow_mixture);

    std::uniform_real_distribution<double> offset(-0.999, -0.001);
    std::vector<double> t0s;
    for (int k = 0; k < o.grids; ++k) t0s.push_back(offset(rng));
    int n = 0;
    for (double t0 : t0s) n = std::max(n, static_cast<int>(std::floor(d.back() - t0)) + 3);
    std::uniform_int_distribution<int> extra(0, 2);
    n += extra(rng);
    if (n > o.max_samples) continue;
    bool ok = true;
    for (double t0 : t0s) {
      SamplingGrid g{t0, n};
      try {
        g.validate(s.signal);
      } catch (const ValidationError&) {
        ok = false;
      }
      s.grids.push_back(g);
    }
    if (ok) return s;
  }
}

}  // namespace gen
