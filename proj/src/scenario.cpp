#include "blurreg/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "blurreg/error.hpp"

namespace blurreg {

using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<int> kReferenceSigns1 = {1, 1, -1, -1, 1, 1, 1, -1, -1, -1, -1, 1, 1};
const std::vector<int> kReferenceSigns2 = {-1, -1, -1, 1, -1, -1, -1, -1, 1, 1, -1, -1, -1};

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

const json& require(const json& doc, const char* key, const std::string& path) {
  if (!doc.contains(key)) bad(path, std::string("missing field '") + key + "'");
  return doc.at(key);
}

double as_real(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  const double value = j.get<double>();
  if (!std::isfinite(value)) bad(path, "expected a finite number");
  return value;
}

std::int64_t as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<std::int64_t>();
}

Rational as_rational(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const ValidationError& e) {
      bad(path, e.what());
    }
  }
  bad(path, "expected an integer or a rational string like \"3/8\"");
}

/// Integers are numerators over 256; strings are rationals that must land
/// on the 1/256 grid.
Q256 as_q256(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Q256(j.get<std::int64_t>());
  const Rational r = as_rational(j, path);
  const Rational scaled = r * Rational(Q256::kDenominator);
  if (scaled.denominator() != 1) bad(path, "value is not a multiple of 1/256");
  return Q256(scaled.numerator());
}

BlurModel parse_blur(const json& j, const std::string& path) {
  if (j.is_number()) return BlurModel::gaussian(as_real(j, path));
  if (!j.is_array() || j.empty()) bad(path, "expected sigma or a nonempty component list");
  std::vector<BlurComponent> components;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string at = path + "[" + std::to_string(k) + "]";
    const auto& c = j[k];
    if (!c.is_object()) bad(at, "expected {\"w\": ..., \"sigma\": ...}");
    const Rational w = c.contains("w") ? as_rational(c["w"], at + ".w") : Rational(1);
    components.push_back({w, as_real(require(c, "sigma", at), at + ".sigma")});
  }
  try {
    return BlurModel(std::move(components));
  } catch (const ValidationError& e) {
    bad(path, e.what());
  }
}

SamplingGrid parse_grid(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected {\"t0\": ..., \"N\": ...}");
  SamplingGrid grid;
  grid.t0 = as_real(require(j, "t0", path), path + ".t0");
  const auto count = as_integer(require(j, "N", path), path + ".N");
  if (count < 1 || count > 100000) bad(path + ".N", "sample count out of range");
  grid.count = static_cast<int>(count);
  return grid;
}

std::vector<NoiseSpec> parse_noise(const json& j, const std::vector<SamplingGrid>& grids) {
  const std::string path = "noise";
  if (!j.is_object()) bad(path, "expected an object");
  const Q256 x = j.contains("x") ? as_q256(j["x"], path + ".x") : Q256(0);
  std::vector<NoiseSpec> out;
  if (j.contains("signs")) {
    const auto& s = j["signs"];
    if (!s.is_array() || s.size() != grids.size()) bad(path + ".signs", "need one pattern per grid");
    for (std::size_t k = 0; k < s.size(); ++k) {
      NoiseSpec spec{x, {}};
      const std::string at = path + ".signs[" + std::to_string(k) + "]";
      if (!s[k].is_array()) bad(at, "expected a list of +1/-1");
      for (const auto& e : s[k]) spec.signs.push_back(static_cast<int>(as_integer(e, at)));
      out.push_back(std::move(spec));
    }
  } else if (j.contains("seeds")) {
    const auto& s = j["seeds"];
    if (!s.is_array() || s.size() != grids.size()) bad(path + ".seeds", "need one seed per grid");
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto seed = as_integer(s[k], path + ".seeds[" + std::to_string(k) + "]");
      out.push_back(NoiseSpec::from_seed(x, grids[k].count, static_cast<std::uint64_t>(seed)));
    }
  } else {
    for (const auto& g : grids) out.push_back({x, std::vector<int>(static_cast<std::size_t>(g.count), 1)});
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    try {
      out[k].validate(static_cast<std::size_t>(grids[k].count));
    } catch (const ValidationError& e) {
      bad(path + "[" + std::to_string(k) + "]", e.what());
    }
  }
  return out;
}

std::string join_ranges(const std::vector<int>& xs) {
  std::ostringstream os;
  for (std::size_t a = 0; a < xs.size();) {
    std::size_t b = a;
    while (b + 1 < xs.size() && xs[b + 1] == xs[b] + 1) ++b;
    if (a) os << ", ";
    os << xs[a] << "/256";
    if (b > a) os << ".." << xs[b] << "/256";
    a = b + 1;
  }
  return os.str();
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc) {
  if (!doc.is_object()) bad("scenario", "expected a JSON object");
  ScenarioConfig config;

  std::vector<Q256> amplitudes;
  const auto& amps = require(doc, "amplitudes", "scenario");
  if (!amps.is_array()) bad("amplitudes", "expected a list");
  for (std::size_t k = 0; k < amps.size(); ++k) {
    amplitudes.push_back(as_q256(amps[k], "amplitudes[" + std::to_string(k) + "]"));
  }
  std::vector<double> discontinuities;
  const auto& ds = require(doc, "discontinuities", "scenario");
  if (!ds.is_array()) bad("discontinuities", "expected a list");
  for (std::size_t k = 0; k < ds.size(); ++k) {
    discontinuities.push_back(as_real(ds[k], "discontinuities[" + std::to_string(k) + "]"));
  }
  const Q256 bound = doc.contains("amplitude_bound") ? as_q256(doc["amplitude_bound"], "amplitude_bound")
                                                     : kDefaultAmplitudeBound;
  try {
    config.signal = PiecewiseConstantSignal(amplitudes, discontinuities, bound);
  } catch (const ValidationError& e) {
    bad("signal", e.what());
  }

  config.blur = parse_blur(require(doc, "blur", "scenario"), "blur");

  if (doc.contains("grids")) {
    const auto& gs = doc["grids"];
    if (!gs.is_array() || gs.empty() || gs.size() > 2) bad("grids", "expected one or two grids");
    for (std::size_t k = 0; k < gs.size(); ++k) {
      config.grids.push_back(parse_grid(gs[k], "grids[" + std::to_string(k) + "]"));
    }
  } else {
    config.grids.push_back(parse_grid(doc, "scenario"));
  }

  config.noise = doc.contains("noise") ? parse_noise(doc["noise"], config.grids)
                                       : parse_noise(json::object(), config.grids);

  if (doc.contains("v")) {
    config.v = as_rational(doc["v"], "v");
    if (*config.v <= Rational(0)) bad("v", "threshold must be positive");
  }
  if (doc.contains("v_scan")) {
    if (!doc["v_scan"].is_boolean()) bad("v_scan", "expected true or false");
    config.v_scan = doc["v_scan"].get<bool>();
  }
  if (doc.contains("inference")) {
    if (!doc["inference"].is_boolean()) bad("inference", "expected true or false");
    config.inference = doc["inference"].get<bool>();
  }
  return config;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

ScenarioConfig reference_example_config(Q256 noise) {
  ScenarioConfig config;
  const Q256 one = Q256::from_int(1);
  config.signal = PiecewiseConstantSignal({one, -one, one, -one}, {0.0, 2.44, 5.01, 7.42, 9.43});
  config.blur = BlurModel::gaussian(0.125);
  config.grids = {{-0.98, 13}, {-0.4, 13}};
  config.noise = {{noise, kReferenceSigns1}, {noise, kReferenceSigns2}};
  config.v = Rational(1, 256);
  config.inference = true;
  return config;
}

std::vector<SequenceData> simulate(const ScenarioConfig& config, CdfFunction cdf) {
  std::vector<SequenceData> out;
  for (std::size_t k = 0; k < config.grids.size(); ++k) {
    SequenceData s;
    s.grid = config.grids[k];
    s.gamma = sample_sequence(config.signal, config.blur, s.grid, cdf);
    s.counts = region_counts(config.signal, s.grid);
    s.y = k < config.noise.size() ? apply_noise(s.gamma, config.noise[k]) : s.gamma;
    s.d = difference_sequence(s.y);
    out.push_back(std::move(s));
  }
  return out;
}

bool RunReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

ordered_json sequence_json(const std::vector<Q256>& values) {
  auto out = ordered_json::array();
  for (auto q : values) out.push_back(format_q256(q));
  return out;
}

namespace {

ordered_json path_json(const ScanEntry& e) {
  return ordered_json::parse(path_result_json(e.v, e.result));
}

}  // namespace

ordered_json RunReport::to_json() const {
  ordered_json j;
  auto& seqs = j["sequences"] = ordered_json::array();
  for (const auto& s : sequences) {
    seqs.push_back({{"t0", s.grid.t0},
                    {"N", s.grid.count},
                    {"gamma", sequence_json(s.gamma)},
                    {"y", sequence_json(s.y)},
                    {"d", sequence_json(s.d)},
                    {"eta", s.counts.eta},
                    {"iota", s.counts.iota}});
  }
  auto& mats = j["matrices"] = ordered_json::array();
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    auto entry = ordered_json::parse(measurement_sidecar_json(matrices[k]));
    if (k < products.size()) {
      auto labels = ordered_json::array();
      for (const auto& e : products[k].entries) labels.push_back(to_string(e.label));
      entry["product_labels"] = labels;
      entry["product_violations"] = products[k].violations;
    }
    mats.push_back(entry);
  }
  if (baseline) {
    j["baseline"] = {{"argmax", baseline->lag}, {"tied", baseline->tied}};
  }
  if (alignment) j["alignment"] = path_json(*alignment);
  if (!scan_best.empty()) {
    auto vs = ordered_json::array();
    for (const auto& e : scan_best) vs.push_back(format_rational(e.v));
    j["scan"] = {{"best_weight", scan_best.front().result.total_weight},
                 {"v", vs},
                 {"first", path_json(scan_best.front())}};
  }
  if (inference) j["inference"] = *inference;
  auto& cs = j["checks"] = ordered_json::array();
  for (const auto& c : checks) {
    cs.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["passed"] = passed();
  return j;
}

ordered_json infer_bounds(const ScenarioConfig& config, const std::vector<SequenceData>& seqs) {
  ConstraintSystem fused;
  const auto& amplitudes = config.signal.amplitudes();
  for (std::size_t k = 0; k < seqs.size(); ++k) {
    const int seq = static_cast<int>(k) + 1;
    fused.merge(config.blur.is_pure() ? extract_constraints(seqs[k].gamma, amplitudes, seq)
                                      : extract_constraints(seqs[k].gamma, amplitudes, config.blur, seq));
  }
  if (config.blur.is_pure()) return ordered_json::parse(bound_report_json(fused));

  // Fully specified mixture: the bounds are plain numbers.
  const auto solved = solve_bounds(fused, 0.0);
  ordered_json out;
  out["feasible"] = solved.feasible;
  auto& vars = out["bounds"] = ordered_json::array();
  for (std::size_t v = 1; solved.feasible && v < fused.variables().size(); ++v) {
    vars.push_back({{"variable", fused.variables()[v]},
                    {"lower", solved.intervals[v].lower},
                    {"upper", solved.intervals[v].upper}});
  }
  return out;
}

RunReport run_scenario(const ScenarioConfig& config) {
  RunReport report;
  report.sequences = simulate(config);

  for (const auto& s : report.sequences) {
    auto m = measurement_matrix(config.signal, config.blur, s.grid, s.gamma);
    auto md = difference_matrix(m.entries);
    report.products.push_back(classify_product(m, md, config.signal, s.counts));
    report.matrices.push_back(std::move(m));
    report.differences.push_back(std::move(md));
  }

  if (report.sequences.size() == 2) {
    const auto& a = report.sequences[0];
    const auto& b = report.sequences[1];
    report.baseline = ccorr_argmax(cross_correlation(a.y, b.y));
    if (a.d.size() != b.d.size()) {
      throw ValidationError("alignment needs two grids with the same sample count");
    }
    if (config.v_scan) {
      const auto scan = scan_thresholds(a.d, b.d, threshold_grid());
      int best = 0;
      for (const auto& e : scan) best = std::max(best, e.result.total_weight);
      for (const auto& e : scan) {
        if (e.result.total_weight == best) report.scan_best.push_back(e);
      }
    } else {
      const Rational v = config.v.value_or(Rational(1, 256));
      report.alignment = ScanEntry{v, longest_path(build_graph(a.d, b.d, v))};
    }
  }

  if (config.inference) report.inference = infer_bounds(config, report.sequences);
  return report;
}

// ---------------------------------------------------------------------------
// Reference example reproduction
// ---------------------------------------------------------------------------

namespace {

struct NuBracket {
  int step;
  double lo;
  double hi;
};

constexpr NuBracket kNuTable[] = {{1, 2.88, 2.89},   {2, 3.07, 3.1},   {4, 3.26, 3.3},
                                  {8, 3.45, 3.49},   {16, 3.65, 3.7},  {32, 3.8, 3.85},
                                  {64, 4.0, 4.05},   {128, 4.15, 4.2}, {256, 4.3, 4.35},
                                  {512, 4.45, 4.5}};

std::vector<Q256> q256s(std::initializer_list<int> nums) {
  std::vector<Q256> out;
  for (int n : nums) out.emplace_back(n);
  return out;
}

/// Runs `body`; an exception turns into a failed check instead of aborting
/// the rest of the reproduction.
void attempt(RunReport& report, const std::string& name, const std::function<Check()>& body) {
  try {
    report.checks.push_back(body());
  } catch (const std::exception& e) {
    report.checks.push_back({name, false, e.what()});
  }
}

std::string mismatches(const std::vector<Q256>& got, const std::vector<Q256>& want) {
  if (got.size() != want.size()) return "length " + std::to_string(got.size());
  std::ostringstream os;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i] != want[i]) {
      os << "[" << i << "] " << format_q256(got[i]) << " != " << format_q256(want[i]) << "; ";
    }
  }
  return os.str();
}

Check affine_check(const std::string& name, const AffineInterval& got, double lower_const,
                   double lower_coeff, double upper_const, double upper_coeff) {
  constexpr double kCoeffTol = 0.02;
  constexpr double kConstTol = 1e-6;
  std::ostringstream os;
  os << got.variable << " in (" << got.lower.constant << " + " << got.lower.sigma_coeff
     << " sigma, " << got.upper.constant << " + " << got.upper.sigma_coeff << " sigma)";
  const bool ok = got.lower.finite && got.upper.finite &&
                  std::abs(got.lower.constant - lower_const) <= kConstTol &&
                  std::abs(got.upper.constant - upper_const) <= kConstTol &&
                  std::abs(got.lower.sigma_coeff - lower_coeff) <= kCoeffTol &&
                  std::abs(got.upper.sigma_coeff - upper_coeff) <= kCoeffTol;
  return {name, ok, os.str()};
}

}  // namespace

RunReport reproduce_reference_example(CdfFunction cdf) {
  const auto config = reference_example_config();
  RunReport report;
  report.sequences = simulate(config, cdf);
  const auto& s1 = report.sequences[0];
  const auto& s2 = report.sequences[1];

  const auto want1 = q256s({0, 144, 256, 256, -256, -256, 16, 256, 256, -256, -256, 0, 0});
  const auto want2 = q256s({0, 256, 256, -205, -256, -256, 256, 256, -218, -256, -22, 0, 0});
  report.checks.push_back({"gamma1", s1.gamma == want1, mismatches(s1.gamma, want1)});
  report.checks.push_back({"gamma2", s2.gamma == want2, mismatches(s2.gamma, want2)});

  const std::vector<int> iota1 = {1, 4, 6, 9, 11};
  const std::vector<int> iota2 = {1, 3, 6, 8, 10};
  report.checks.push_back({"region_counts", s1.counts.iota == iota1 && s2.counts.iota == iota2, ""});

  attempt(report, "nu_table", [] {
    std::ostringstream os;
    bool ok = true;
    for (const auto& row : kNuTable) {
      const double nu = nu_threshold(Q256::from_int(row.step));
      const bool in = row.lo < nu && nu < row.hi;
      ok = ok && in;
      if (!in) os << "|step| " << row.step << ": " << nu << "; ";
    }
    return Check{"nu_table", ok, os.str()};
  });

  attempt(report, "blur_bound", [&] {
    const auto b = blur_bound_check(config.signal, config.blur);
    return Check{"blur_bound", b.satisfied, "sigma bound " + std::to_string(b.sigma_bound)};
  });

  attempt(report, "matrices", [&] {
    for (const auto& s : report.sequences) {
      auto m = measurement_matrix(config.signal, config.blur, s.grid, s.gamma);
      auto md = difference_matrix(m.entries);
      report.products.push_back(classify_product(m, md, config.signal, s.counts));
      report.matrices.push_back(std::move(m));
      report.differences.push_back(std::move(md));
    }
    std::string detail;
    for (const auto& p : report.products) {
      for (const auto& v : p.violations) detail += v + "; ";
    }
    return Check{"matrices", detail.empty(), detail};
  });

  // d at noise x, written out for both patterns.
  attempt(report, "difference_sequences", [&] {
    std::vector<int> bad_x;
    for (int x = 0; x <= 128; ++x) {
      const auto c = reference_example_config(Q256(x));
      const auto seqs = simulate(c, cdf);
      // Entry 11 follows the sign pattern (-x then +x), which gives 256 + 2x;
      // the printed closed form has 256 - 2x there.
      const auto want_d1 = q256s({x, 144, 112 - 2 * x, 0, -512 + 2 * x, 0, 272, 240 - 2 * x, 0,
                                  -512, 0, 256 + 2 * x, 0});
      const auto want_d2 = q256s({-x, 256, 0, -461 + 2 * x, -51 - 2 * x, 0, 512, 0, -474 + 2 * x,
                                  -38, 234 - 2 * x, 22, 0});
      if (seqs[0].d != want_d1 || seqs[1].d != want_d2) bad_x.push_back(x);
    }
    return Check{"difference_sequences", bad_x.empty(),
                 bad_x.empty() ? "" : "differs at x = " + join_ranges(bad_x)};
  });

  attempt(report, "baseline_breakpoint", [&] {
    std::vector<int> bad_x;
    for (int x = 0; x <= 128; ++x) {
      const auto seqs = simulate(reference_example_config(Q256(x)), cdf);
      const auto arg = ccorr_argmax(cross_correlation(seqs[0].y, seqs[1].y));
      if (arg.lag != (x <= 70 ? -1 : -5)) bad_x.push_back(x);
      if (x == 0) report.baseline = arg;
    }
    return Check{"baseline_breakpoint", bad_x.empty(),
                 bad_x.empty() ? "argmax -1 up to 70/256, -5 from 71/256"
                               : "unexpected argmax at x = " + join_ranges(bad_x)};
  });

  attempt(report, "alignment_range", [&] {
    const std::vector<std::pair<int, int>> want = {{1, 1}, {4, 3}, {6, 6}, {9, 8}, {11, 10}};
    std::vector<int> bad_x;
    for (int x = 0; x <= 102; ++x) {
      const auto seqs = simulate(reference_example_config(Q256(x)), cdf);
      const auto scan = scan_thresholds(seqs[0].d, seqs[1].d, threshold_grid());
      bool found = false;
      for (const auto& e : scan) {
        if (e.result.total_weight == 5 && e.result.pair_indices() == want) {
          found = true;
          break;
        }
      }
      if (!found) bad_x.push_back(x);
    }
    return Check{"alignment_range", bad_x.empty(),
                 bad_x.empty() ? "every x up to 102/256 has a recovering threshold"
                               : "no threshold recovers all five pairs at x = " + join_ranges(bad_x)};
  });

  attempt(report, "alignment_noiseless", [&] {
    const Rational v(1, 256);
    report.alignment = ScanEntry{v, longest_path(build_graph(s1.d, s2.d, v))};
    const std::vector<std::pair<int, int>> want = {{1, 1}, {4, 3}, {6, 6}, {9, 8}, {11, 10}};
    const auto& r = report.alignment->result;
    return Check{"alignment_noiseless", r.total_weight == 5 && r.pair_indices() == want,
                 "weight " + std::to_string(r.total_weight)};
  });

  const auto amplitudes = config.signal.amplitudes();
  attempt(report, "t1_interval", [&] {
    const auto sys = extract_constraints(s1.gamma, amplitudes, 1);
    return affine_check("t1_interval", recover_interval(sys, "t1"), -1.0, 0.15, -1.0, 0.17);
  });
  attempt(report, "d2_interval", [&] {
    const auto sys = extract_constraints(s1.gamma, amplitudes, 1);
    return affine_check("d2_interval", recover_interval(sys, "D2"), 5.0, 0.06, 5.0, 0.1);
  });
  attempt(report, "fused_sigma_max", [&] {
    ConstraintSystem fused = extract_constraints(s1.gamma, amplitudes, 1);
    fused.merge(extract_constraints(s2.gamma, amplitudes, 2));
    report.inference = ordered_json::parse(bound_report_json(fused));
    const double ratio = 1.0 / sigma_max(fused);
    return Check{"fused_sigma_max", ratio >= 7.5 && ratio <= 7.75,
                 "T/sigma_max = " + std::to_string(ratio)};
  });
  return report;
}

}  // namespace blurreg
