#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blurreg/rational.hpp"
#include "blurreg/signal.hpp"

namespace blurreg {

/// Small dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int i, int j) { return data_[index(i, j)]; }
  const T& operator()(int i, int j) const { return data_[index(i, j)]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(j);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

/// nu with Phi(nu) = 1 - 1/(512 |delta|): the normalized distance past which
/// round-off hides the blur of a step of size delta.
double nu_threshold(Q256 delta_magnitude);

struct BlurBoundCheck {
  bool satisfied = false;
  /// 0.5 T / max_j nu_j
  double sigma_bound = 0.0;
  /// sigma_bound - max_k sigma_k
  double margin = 0.0;
};

/// Small-blur condition: every mixture component sigma_k < 0.5 / max_j nu_j.
BlurBoundCheck blur_bound_check(const PiecewiseConstantSignal& signal, const BlurModel& blur);

/// M~(i, j) = Phi((t0 + i - D_j) / sigma), mixture-weighted.
Matrix<double> deformation_matrix(const PiecewiseConstantSignal& signal, const BlurModel& blur,
                                  const SamplingGrid& grid);

enum class ColumnForm {
  kPure,   // 0 up to iota(j)-1, 1 from iota(j)
  kFirst,  // critical value in (1/2, 1) at iota(j)
  kSecond, // critical value in (0, 1/2) at iota(j)-1
};

const char* to_string(ColumnForm form);

struct MeasurementMatrix {
  Matrix<Rational> entries;
  std::vector<ColumnForm> column_forms;
  /// Row holding the column's critical value, or -1 for pure columns.
  std::vector<int> critical_rows;
  /// iota(j) implied by each column's form.
  std::vector<int> iota;
};

/// Round-off corrupted deformation matrix with gamma = M g_D exactly.
///
/// Entries whose normalized distance to D_j exceeds nu_j for every mixture
/// component snap to 0 or 1. The remaining entry of column j (at most one
/// in the small-blur regime) becomes (gamma[i] - rest of row) / (g_{j+1} - g_j).
/// Throws RegimeError when the blur bound fails, discontinuities are 2T
/// or closer, or the resulting matrix does not have the single-critical-value
/// structure.
MeasurementMatrix measurement_matrix(const PiecewiseConstantSignal& signal, const BlurModel& blur,
                                     const SamplingGrid& grid, const QuantizedSequence& gamma);

/// Blur so wide that every deformation entry lies within
/// 1 / (512 (m+1) max|step|) of 1/2. Round-off then flattens M to 1/2
/// everywhere and gamma to zero.
bool is_saturated(const PiecewiseConstantSignal& signal, const BlurModel& blur,
                  const SamplingGrid& grid);

/// Smallest pure Gaussian sigma (to 1e-9 relative) that saturates the grid.
double saturating_sigma(const PiecewiseConstantSignal& signal, const SamplingGrid& grid);

/// The all-1/2 measurement matrix of a saturated blur. Throws RegimeError
/// when the blur does not saturate.
Matrix<Rational> saturated_measurement_matrix(const PiecewiseConstantSignal& signal,
                                              const BlurModel& blur, const SamplingGrid& grid);

/// Measurement matrix without blur: eta_0 zero rows, then eta_k rows that
/// start with k ones, then eta_{m+1} rows of ones.
Matrix<Rational> no_blur_matrix(const PiecewiseConstantSignal& signal, const SamplingGrid& grid);

/// First row of M, then successive row differences.
Matrix<Rational> difference_matrix(const Matrix<Rational>& m);

/// M v for an exact vector on the 1/256 grid.
std::vector<Rational> multiply(const Matrix<Rational>& m, const std::vector<Q256>& v);

enum class ProductLabel {
  kZero,
  kFull,   // whole step at iota(j)
  kMajor,  // larger share of a split step
  kMinor,  // smaller share of a split step
};

const char* to_string(ProductLabel label);

/// Which branch of the closed form for [M_D g_D]_i produced the entry.
enum class ProductCase {
  kNone,
  kBeforeIota,       // i = iota(j) - 1:                   M(i, j) * step
  kAtIotaClean,      // i = iota(j), M(i-1, j) = 0:        M(i, j) * step
  kAtIotaAfterSplit, // i = iota(j), M(i-1, j) > 0:        (1 - M(i-1, j)) * step
  kAfterIota,        // i = iota(j) + 1:                   (1 - M(i-1, j)) * step
};

const char* to_string(ProductCase c);

struct ProductEntry {
  Rational value;
  ProductLabel label = ProductLabel::kZero;
  int column = -1;
  ProductCase branch = ProductCase::kNone;
};

struct ProductClassification {
  std::vector<ProductEntry> entries;
  /// Human-readable descriptions of failed structural claims. Empty when
  /// every row has at most one contribution and both sparsity statements hold.
  std::vector<std::string> violations;
  /// How many times each sparsity statement had a nonvacuous premise.
  int pure_neighbor_checks = 0;
  int adjacent_split_checks = 0;
};

/// Evaluates [M_D g_D] from the closed form by column structure, labels each
/// entry and checks the sparsity statements for pure and adjacent columns.
/// Throws RegimeError when two columns claim the same row with nonzero mass.
ProductClassification classify_product(const MeasurementMatrix& m,
                                       const Matrix<Rational>& difference,
                                       const PiecewiseConstantSignal& signal,
                                       const RegionCounts& counts);

/// CSV with one row per matrix row; entries as "num/256" when they sit on
/// the 1/256 grid and reduced "num/den" otherwise.
std::string matrix_to_csv(const Matrix<Rational>& m);

/// JSON sidecar describing column forms, critical rows and iota.
std::string measurement_sidecar_json(const MeasurementMatrix& m);

}  // namespace blurreg
