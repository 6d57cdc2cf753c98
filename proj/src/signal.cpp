#include "blurreg/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blurreg/error.hpp"

namespace blurreg {

namespace {

constexpr double kCoincidenceTolerance = 1e-12;

}  // namespace

PiecewiseConstantSignal::PiecewiseConstantSignal(std::vector<Q256> amplitudes,
                                                 std::vector<double> discontinuities,
                                                 Q256 amplitude_bound)
    : amplitudes_(std::move(amplitudes)), discontinuities_(std::move(discontinuities)) {
  if (amplitudes_.empty()) throw ValidationError("signal needs at least one region");
  if (discontinuities_.size() != amplitudes_.size() + 1) {
    throw ValidationError("signal with " + std::to_string(amplitudes_.size()) +
                          " regions needs " + std::to_string(amplitudes_.size() + 1) +
                          " discontinuities (D_0..D_m)");
  }
  if (discontinuities_.front() != 0.0) throw ValidationError("D_0 must be 0");
  for (std::size_t j = 1; j < discontinuities_.size(); ++j) {
    if (!(discontinuities_[j] > discontinuities_[j - 1]) || !std::isfinite(discontinuities_[j])) {
      throw ValidationError("discontinuities must be finite and strictly increasing");
    }
  }
  if (amplitudes_.front().is_zero() || amplitudes_.back().is_zero()) {
    throw ValidationError("first and last amplitudes must be nonzero");
  }
  for (std::size_t j = 0; j < amplitudes_.size(); ++j) {
    if (abs(amplitudes_[j]) > amplitude_bound) {
      throw ValidationError("amplitude " + format_q256(amplitudes_[j]) + " exceeds bound " +
                            format_q256(amplitude_bound));
    }
    if (j + 1 < amplitudes_.size() && amplitudes_[j] == amplitudes_[j + 1]) {
      throw ValidationError("adjacent regions " + std::to_string(j + 1) + " and " +
                            std::to_string(j + 2) + " share an amplitude");
    }
  }
}

Q256 PiecewiseConstantSignal::level(int j) const {
  if (j <= 0 || j > regions()) return Q256(0);
  return amplitudes_[static_cast<std::size_t>(j - 1)];
}

double PiecewiseConstantSignal::min_spacing() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < discontinuities_.size(); ++j) {
    best = std::min(best, discontinuities_[j] - discontinuities_[j - 1]);
  }
  return best;
}

Q256 PiecewiseConstantSignal::max_abs_step() const {
  Q256 best(0);
  for (int j = 0; j <= regions(); ++j) best = std::max(best, abs(step(j)));
  return best;
}

BlurModel::BlurModel(std::vector<BlurComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("blur model needs at least one component");
  Rational total(0);
  for (const auto& c : components_) {
    if (c.weight <= Rational(0)) throw ValidationError("blur weights must be positive");
    if (!(c.sigma > 0.0) || !std::isfinite(c.sigma)) {
      throw ValidationError("blur sigma must be positive and finite");
    }
    total += c.weight;
  }
  if (total != Rational(1)) {
    throw ValidationError("blur weights sum to " + format_rational(total) + ", expected 1");
  }
}

double BlurModel::max_sigma() const {
  double best = 0.0;
  for (const auto& c : components_) best = std::max(best, c.sigma);
  return best;
}

double BlurModel::step_response(double z, CdfFunction cdf) const {
  double value = 0.0;
  for (const auto& c : components_) value += to_double(c.weight) * cdf(z / c.sigma);
  return value;
}

void SamplingGrid::validate(const PiecewiseConstantSignal& signal) const {
  const auto& d = signal.discontinuities();
  if (count < 2) throw ValidationError("grid needs at least two samples");
  if (!(t0 < 0.0)) throw ValidationError("grid must start before the support (t0 < 0)");
  if (!(time(count - 1) > d.back())) {
    std::ostringstream os;
    os << "grid ends at " << time(count - 1) << ", which does not pass D_m = " << d.back();
    throw ValidationError(os.str());
  }
  for (int i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (std::abs(time(i) - d[j]) < kCoincidenceTolerance) {
        throw ValidationError("sample " + std::to_string(i) + " falls on discontinuity D_" +
                              std::to_string(j));
      }
    }
  }
  for (std::size_t a = 0; a < d.size(); ++a) {
    for (std::size_t b = a + 1; b < d.size(); ++b) {
      const double gap = d[b] - d[a];
      if (std::abs(gap - std::round(gap)) < kCoincidenceTolerance) {
        throw ValidationError("D_" + std::to_string(a) + " and D_" + std::to_string(b) +
                              " are an integer number of samples apart");
      }
    }
  }
}

Q256 eval_signal(const PiecewiseConstantSignal& signal, double t) {
  const auto& d = signal.discontinuities();
  for (int j = 1; j <= signal.regions(); ++j) {
    if (d[static_cast<std::size_t>(j - 1)] <= t && t < d[static_cast<std::size_t>(j)]) {
      return signal.level(j);
    }
  }
  return Q256(0);
}

double eval_blurred(const PiecewiseConstantSignal& signal, const BlurModel& blur, double t,
                    CdfFunction cdf) {
  double value = 0.0;
  for (int j = 0; j <= signal.regions(); ++j) {
    value += signal.step(j).to_double() * blur.step_response(t - signal.discontinuity(j), cdf);
  }
  return value;
}

Q256 quantize(double value) {
  if (!std::isfinite(value)) throw ValidationError("cannot quantize a non-finite value");
  // Scaling by 256 is exact; nearbyint honours the default round-half-even mode.
  return Q256(static_cast<std::int64_t>(std::nearbyint(value * 256.0)));
}

QuantizedSequence sample_sequence(const PiecewiseConstantSignal& signal, const BlurModel& blur,
                                  const SamplingGrid& grid, CdfFunction cdf) {
  grid.validate(signal);
  QuantizedSequence out;
  out.reserve(static_cast<std::size_t>(grid.count));
  for (int i = 0; i < grid.count; ++i) {
    out.push_back(quantize(eval_blurred(signal, blur, grid.time(i), cdf)));
  }
  return out;
}

std::vector<Q256> difference_vector(const PiecewiseConstantSignal& signal) {
  std::vector<Q256> out;
  for (int j = 0; j <= signal.regions(); ++j) out.push_back(signal.step(j));
  return out;
}

RegionCounts region_counts(const PiecewiseConstantSignal& signal, const SamplingGrid& grid) {
  const auto& d = signal.discontinuities();
  RegionCounts rc;
  rc.eta.assign(d.size() + 1, 0);
  for (int i = 0; i < grid.count; ++i) {
    const double t = grid.time(i);
    std::size_t region = 0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (std::abs(t - d[j]) < kCoincidenceTolerance) {
        throw ValidationError("sample " + std::to_string(i) + " falls on discontinuity D_" +
                              std::to_string(j));
      }
      if (t > d[j]) region = j + 1;
    }
    ++rc.eta[region];
  }
  int running = 0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    running += rc.eta[j];
    rc.iota.push_back(running);
  }
  return rc;
}

}  // namespace blurreg
