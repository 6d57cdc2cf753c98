#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blurreg/alignment.hpp"
#include "blurreg/baseline.hpp"
#include "blurreg/inference.hpp"
#include "blurreg/matrices.hpp"
#include "blurreg/signal.hpp"

namespace blurreg {

/// One experiment: a signal, a blur, one or two sampling grids, the noise
/// to add to each sequence and how to pick the alignment threshold.
struct ScenarioConfig {
  PiecewiseConstantSignal signal{{Q256::from_int(1)}, {0.0, 3.5}};
  BlurModel blur = BlurModel::gaussian(0.1);
  std::vector<SamplingGrid> grids;
  /// One per grid. Empty means noiseless.
  std::vector<NoiseSpec> noise;
  std::optional<Rational> v;
  bool v_scan = false;
  bool inference = false;
};

/// Parses a scenario document:
///
///   amplitudes       numerators over 256
///   discontinuities  D_0..D_m in sample units
///   amplitude_bound  optional, numerator over 256
///   blur             [{"w": "1/2", "sigma": 0.1}, ...] or a bare sigma
///   grids            [{"t0": -0.5, "N": 12}, ...], or top-level t0 / N
///   noise            {"x": 3, "signs": [[...], ...]} or {"x": 3, "seeds": [..]}
///   v / v_scan       alignment threshold ("1/256") or a scan over k/512
///   inference        run interval inference on the noiseless sequences
///
/// Throws ValidationError with a field path on any malformed entry.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::string& path);

/// The four-region example signal sampled on two shifted grids.
ScenarioConfig reference_example_config(Q256 noise = Q256(0));

/// Sign patterns used with the reference example.
extern const std::vector<int> kReferenceSigns1;
extern const std::vector<int> kReferenceSigns2;

struct SequenceData {
  SamplingGrid grid;
  QuantizedSequence gamma;
  QuantizedSequence y;
  std::vector<Q256> d;
  RegionCounts counts;
};

/// Samples every grid and applies its noise. Throws ValidationError for
/// grids that do not fit the signal.
std::vector<SequenceData> simulate(const ScenarioConfig& config, CdfFunction cdf = normal_cdf);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunReport {
  std::vector<SequenceData> sequences;
  std::vector<MeasurementMatrix> matrices;
  std::vector<Matrix<Rational>> differences;
  std::vector<ProductClassification> products;
  std::optional<ArgmaxResult> baseline;
  /// Alignment at a fixed threshold.
  std::optional<ScanEntry> alignment;
  /// Every threshold reaching the best weight when scanning.
  std::vector<ScanEntry> scan_best;
  std::optional<nlohmann::ordered_json> inference;
  std::vector<Check> checks;

  bool passed() const;
  nlohmann::ordered_json to_json() const;
};

/// Interval bounds from the noiseless sequences, fused across grids. A pure
/// Gaussian leaves sigma unknown; a mixture is taken as fully specified.
nlohmann::ordered_json infer_bounds(const ScenarioConfig& config,
                                    const std::vector<SequenceData>& sequences);

/// sample -> noise -> matrices -> baseline -> alignment -> inference.
/// Throws RegimeError when the blur is too wide for the matrix structure.
RunReport run_scenario(const ScenarioConfig& config);

/// Rebuilds the reference example and compares every published quantity:
/// sequences, region counts, the nu table, the correlation breakpoint, the
/// alignment success range and the inferred intervals. `cdf` lets tests
/// inject a degraded normal CDF.
RunReport reproduce_reference_example(CdfFunction cdf = normal_cdf);

/// Sequences as "num/256" strings.
nlohmann::ordered_json sequence_json(const std::vector<Q256>& values);

}  // namespace blurreg
