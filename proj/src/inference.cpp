#include "blurreg/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include <nlohmann/json.hpp>

#include "blurreg/error.hpp"
#include "blurreg/normal.hpp"

namespace blurreg {

ConstraintSystem::ConstraintSystem() { names_.push_back("D0"); }

int ConstraintSystem::variable(const std::string& name) {
  if (auto idx = find(name)) return *idx;
  names_.push_back(name);
  return static_cast<int>(names_.size()) - 1;
}

std::optional<int> ConstraintSystem::find(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

void ConstraintSystem::merge(const ConstraintSystem& other) {
  for (auto b : other.bounds_) {
    b.upper = variable(other.names_[static_cast<std::size_t>(b.upper)]);
    b.lower = variable(other.names_[static_cast<std::size_t>(b.lower)]);
    bounds_.push_back(b);
  }
}

namespace {

/// Linear form c + b * sigma for an offset (sample time - D_j).
struct OffsetLimit {
  double constant = 0.0;
  double sigma_coeff = 0.0;
};

/// Maps a step-response probability to an offset limit.
using ProbabilityToOffset = std::function<OffsetLimit(double)>;

class Extractor {
 public:
  Extractor(const std::vector<Q256>& amplitudes, int sequence, ProbabilityToOffset to_offset)
      : amplitudes_(amplitudes), sequence_(sequence), to_offset_(std::move(to_offset)) {
    time_ = system_.variable("t" + std::to_string(sequence));
    for (std::size_t j = 0; j <= amplitudes_.size(); ++j) {
      discontinuity_.push_back(j == 0 ? 0 : system_.variable("D" + std::to_string(j)));
    }
  }

  ConstraintSystem run(const QuantizedSequence& gamma) {
    const int m = static_cast<int>(amplitudes_.size());
    int region = 0;
    for (int i = 0; i < static_cast<int>(gamma.size()); ++i) {
      const Q256 value = gamma[static_cast<std::size_t>(i)];
      if (value == level(region)) {
        plateau(i, region);
      } else if (region <= m && value == level(region + 1)) {
        ++region;
        plateau(i, region);
      } else if (region <= m && strictly_between(value, level(region), level(region + 1))) {
        transition(i, region, value);
        ++region;
      } else {
        throw ValidationError("sample " + std::to_string(i) + " of sequence " +
                              std::to_string(sequence_) + " (" + format_q256(value) +
                              ") fits neither plateau " + std::to_string(region) +
                              " nor the next transition");
      }
    }
    if (region != m + 1) {
      throw ValidationError("sequence " + std::to_string(sequence_) +
                            " ends before the last discontinuity");
    }
    return system_;
  }

 private:
  Q256 level(int r) const {
    if (r <= 0 || r > static_cast<int>(amplitudes_.size())) return Q256(0);
    return amplitudes_[static_cast<std::size_t>(r - 1)];
  }

  static bool strictly_between(Q256 v, Q256 a, Q256 b) {
    return (a < v && v < b) || (b < v && v < a);
  }

  double saturation_probability(int j) const {
    const Q256 step = abs(level(j + 1) - level(j));
    return 1.0 / (2.0 * static_cast<double>(step.num));
  }

  // offset(i, j) = t + i - D_j > limit
  void offset_above(int i, int j, OffsetLimit limit) {
    system_.add({discontinuity_[static_cast<std::size_t>(j)], time_, i - limit.constant,
                 -limit.sigma_coeff, sequence_, i});
  }

  // offset(i, j) < limit
  void offset_below(int i, int j, OffsetLimit limit) {
    system_.add({time_, discontinuity_[static_cast<std::size_t>(j)], limit.constant - i,
                 limit.sigma_coeff, sequence_, i});
  }

  void neighbours(int i, int before, int after) {
    const int m = static_cast<int>(amplitudes_.size());
    if (before >= 0) offset_above(i, before, to_offset_(1.0 - saturation_probability(before)));
    if (after <= m) offset_below(i, after, to_offset_(saturation_probability(after)));
  }

  void plateau(int i, int region) { neighbours(i, region - 1, region); }

  void transition(int i, int j, Q256 value) {
    const Rational step = (level(j + 1) - level(j)).to_rational();
    const Rational half_bin(1, 2 * Q256::kDenominator);
    const Rational rise = value.to_rational() - level(j).to_rational();
    Rational lo = (rise - half_bin) / step;
    Rational hi = (rise + half_bin) / step;
    if (lo > hi) std::swap(lo, hi);
    if (lo > Rational(0)) offset_above(i, j, to_offset_(to_double(lo)));
    if (hi < Rational(1)) offset_below(i, j, to_offset_(to_double(hi)));
    neighbours(i, j - 1, j + 1);
  }

  const std::vector<Q256>& amplitudes_;
  int sequence_;
  ProbabilityToOffset to_offset_;
  ConstraintSystem system_;
  int time_ = 0;
  std::vector<int> discontinuity_;
};

}  // namespace

ConstraintSystem extract_constraints(const QuantizedSequence& gamma,
                                     const std::vector<Q256>& amplitudes, int sequence) {
  Extractor ex(amplitudes, sequence,
               [](double p) { return OffsetLimit{0.0, normal_quantile(p)}; });
  return ex.run(gamma);
}

ConstraintSystem extract_constraints(const QuantizedSequence& gamma,
                                     const std::vector<Q256>& amplitudes, const BlurModel& blur,
                                     int sequence) {
  const double reach = 60.0 * blur.max_sigma();
  Extractor ex(amplitudes, sequence, [&blur, reach](double p) {
    const auto cdf = [&blur](double z) { return blur.step_response(z); };
    return OffsetLimit{invert_monotone(cdf, p, -reach, reach), 0.0};
  });
  return ex.run(gamma);
}

BoundSolution solve_bounds(const ConstraintSystem& system, double sigma) {
  const auto n = system.variables().size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoundSolution out;
  out.pairwise.assign(n, std::vector<double>(n, inf));

  for (std::size_t source = 0; source < n; ++source) {
    auto& dist = out.pairwise[source];
    dist[source] = 0.0;
    for (std::size_t pass = 0; pass < n; ++pass) {
      bool changed = false;
      for (const auto& b : system.bounds()) {
        const auto from = static_cast<std::size_t>(b.lower);
        const auto to = static_cast<std::size_t>(b.upper);
        if (dist[from] == inf) continue;
        const double candidate = dist[from] + b.rhs(sigma);
        if (candidate < dist[to]) {
          dist[to] = candidate;
          changed = true;
        }
      }
      if (!changed) break;
      // Still relaxing on the n-th pass: a negative cycle.
      if (pass + 1 == n) return out;
    }
    if (dist[source] < 0.0) return out;
  }

  out.feasible = true;
  for (std::size_t v = 0; v < n; ++v) {
    out.intervals.push_back({-out.pairwise[v][0], out.pairwise[0][v]});
  }
  return out;
}

namespace {

// Sum of sigma coefficients around some negative cycle at this sigma, or
// nullopt when the system is feasible. A positive slope means a larger sigma
// relaxes the cycle.
std::optional<double> negative_cycle_slope(const ConstraintSystem& system, double sigma) {
  const auto n = system.variables().size();
  const auto& bounds = system.bounds();
  std::vector<double> dist(n, 0.0);
  std::vector<int> via(n, -1);
  int touched = -1;
  for (std::size_t pass = 0; pass < n; ++pass) {
    touched = -1;
    for (std::size_t e = 0; e < bounds.size(); ++e) {
      const auto from = static_cast<std::size_t>(bounds[e].lower);
      const auto to = static_cast<std::size_t>(bounds[e].upper);
      const double candidate = dist[from] + bounds[e].rhs(sigma);
      if (candidate < dist[to]) {
        dist[to] = candidate;
        via[to] = static_cast<int>(e);
        touched = static_cast<int>(to);
      }
    }
    if (touched < 0) return std::nullopt;
  }
  // Walking back n edges from a vertex relaxed on the last pass lands on the cycle.
  auto v = static_cast<std::size_t>(touched);
  for (std::size_t k = 0; k < n; ++k) v = static_cast<std::size_t>(bounds[static_cast<std::size_t>(via[v])].lower);
  double slope = 0.0;
  auto u = v;
  do {
    const auto& b = bounds[static_cast<std::size_t>(via[u])];
    slope += b.sigma_coeff;
    u = static_cast<std::size_t>(b.lower);
  } while (u != v);
  return slope;
}

}  // namespace

double sigma_max(const ConstraintSystem& system, double tolerance, double sigma_cap) {
  if (!negative_cycle_slope(system, sigma_cap)) return sigma_cap;
  // The feasible sigmas form an interval (projection of a polyhedron). Find a
  // point inside it, steering by the slope of whichever cycle is negative.
  double lo = std::min(1e-9, sigma_cap);
  double hi = sigma_cap;
  double inside = -1.0;
  for (double probe = lo; hi - lo > tolerance * 1e-3; probe = 0.5 * (lo + hi)) {
    const auto slope = negative_cycle_slope(system, probe);
    if (!slope) {
      inside = probe;
      break;
    }
    if (*slope == 0.0) break;
    (*slope > 0.0 ? lo : hi) = probe;
  }
  if (inside < 0.0) throw ValidationError("constraint system is infeasible for every sigma > 0");

  lo = inside;
  hi = sigma_cap;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (negative_cycle_slope(system, mid) ? hi : lo) = mid;
  }
  return lo;
}

AffineInterval recover_interval(const ConstraintSystem& system, const std::string& variable,
                                double sigma_a, double sigma_b) {
  const auto idx = system.find(variable);
  if (!idx) throw ValidationError("unknown variable '" + variable + "'");
  const auto a = solve_bounds(system, sigma_a);
  const auto b = solve_bounds(system, sigma_b);
  if (!a.feasible || !b.feasible) {
    throw ValidationError("system infeasible at the sigma values used for coefficient recovery");
  }
  auto fit = [&](double va, double vb) {
    AffineCoefficients c;
    c.finite = std::isfinite(va) && std::isfinite(vb);
    if (c.finite) {
      c.sigma_coeff = (vb - va) / (sigma_b - sigma_a);
      c.constant = va - c.sigma_coeff * sigma_a;
    }
    return c;
  };
  const auto i = static_cast<std::size_t>(*idx);
  return {variable, fit(a.intervals[i].lower, b.intervals[i].lower),
          fit(a.intervals[i].upper, b.intervals[i].upper)};
}

std::string bound_report_json(const ConstraintSystem& system) {
  nlohmann::ordered_json report;
  auto& vars = report["bounds"] = nlohmann::ordered_json::array();
  auto coeffs = [](const AffineCoefficients& c) -> nlohmann::ordered_json {
    if (!c.finite) return nullptr;
    return {{"a", c.constant}, {"b", c.sigma_coeff}};
  };
  for (std::size_t v = 1; v < system.variables().size(); ++v) {
    const auto interval = recover_interval(system, system.variables()[v]);
    vars.push_back({{"variable", interval.variable},
                    {"lower", coeffs(interval.lower)},
                    {"upper", coeffs(interval.upper)}});
  }
  try {
    report["sigma_max"] = sigma_max(system);
  } catch (const ValidationError&) {
    report["sigma_max"] = nullptr;
  }
  return report.dump(2) + "\n";
}

}  // namespace blurreg
