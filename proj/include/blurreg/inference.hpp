#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "blurreg/rational.hpp"
#include "blurreg/signal.hpp"

namespace blurreg {

/// `upper - lower < constant + sigma_coeff * sigma`, all lengths in units of T.
///
/// Lower bounds on a difference are stored with the variables swapped, so
/// every bound reads as an upper bound.
struct AffineBound {
  int upper = 0;
  int lower = 0;
  double constant = 0.0;
  double sigma_coeff = 0.0;
  int sequence = 0;
  int sample = 0;

  double rhs(double sigma) const { return constant + sigma_coeff * sigma; }
};

/// Difference constraints over first-sample times and discontinuity points.
/// Variable 0 is D_0, pinned to zero.
class ConstraintSystem {
 public:
  ConstraintSystem();

  /// Index of `name`, registering it on first use.
  int variable(const std::string& name);
  std::optional<int> find(const std::string& name) const;

  const std::vector<std::string>& variables() const { return names_; }
  const std::vector<AffineBound>& bounds() const { return bounds_; }

  void add(const AffineBound& bound) { bounds_.push_back(bound); }

  /// Union of both systems; variables are matched by name.
  void merge(const ConstraintSystem& other);

 private:
  std::vector<std::string> names_;
  std::vector<AffineBound> bounds_;
};

/// Constraints implied by a noiseless quantized sequence of a signal whose
/// amplitudes are known and whose blur is pure Gaussian with unknown sigma.
///
/// Samples are walked in order and attributed to the plateau or transition
/// they belong to. Plateau samples give one-sided bounds at +-nu against the
/// neighbouring discontinuities; transition samples give a two-sided window
/// from the 1/512 quantization interval. `sequence` tags the bounds and
/// names the time variable "t<sequence>".
ConstraintSystem extract_constraints(const QuantizedSequence& gamma,
                                     const std::vector<Q256>& amplitudes, int sequence);

/// Same attribution, but under a fully specified blur model: the bounds
/// become constants (sigma_coeff = 0).
ConstraintSystem extract_constraints(const QuantizedSequence& gamma,
                                     const std::vector<Q256>& amplitudes, const BlurModel& blur,
                                     int sequence);

struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

struct BoundSolution {
  bool feasible = false;
  /// Interval for every variable relative to D_0 = 0.
  std::vector<Interval> intervals;
  /// Tightest bound on x_u - x_w, indexed [w][u].
  std::vector<std::vector<double>> pairwise;
};

/// Bellman-Ford tightening of the difference constraints at a fixed sigma.
BoundSolution solve_bounds(const ConstraintSystem& system, double sigma);

/// Supremum of sigma for which the system is feasible, found by bisection
/// to `tolerance`. Throws ValidationError if no positive sigma up to
/// `sigma_cap` is feasible; returns `sigma_cap` when everything is.
double sigma_max(const ConstraintSystem& system, double tolerance = 1e-9, double sigma_cap = 1.0);

struct AffineCoefficients {
  double constant = 0.0;
  double sigma_coeff = 0.0;
  bool finite = false;
};

struct AffineInterval {
  std::string variable;
  AffineCoefficients lower;
  AffineCoefficients upper;
};

/// Recovers `a + b sigma` forms for each side of a variable's interval by
/// solving at two small sigma values.
AffineInterval recover_interval(const ConstraintSystem& system, const std::string& variable,
                                double sigma_a = 1e-3, double sigma_b = 2e-3);

/// JSON bound report: one object per variable plus sigma_max.
std::string bound_report_json(const ConstraintSystem& system);

}  // namespace blurreg
