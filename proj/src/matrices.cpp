#include "blurreg/matrices.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "blurreg/error.hpp"
#include "blurreg/normal.hpp"

namespace blurreg {

namespace {

const Rational kZero(0);
const Rational kOne(1);
const Rational kHalf(1, 2);

bool strictly_inside_unit(const Rational& r) { return r > kZero && r < kOne; }

std::string grid_string(const Rational& r) {
  if (Q256::kDenominator % r.denominator() == 0) {
    return std::to_string(r.numerator() * (Q256::kDenominator / r.denominator())) + "/256";
  }
  return format_rational(r);
}

}  // namespace

double nu_threshold(Q256 delta_magnitude) {
  if (delta_magnitude.num <= 0) throw ValidationError("nu_threshold needs a positive step size");
  // 512 |delta| = 2 * numerator when delta is measured on the 1/256 grid.
  const double tail = 1.0 / (2.0 * static_cast<double>(delta_magnitude.num));
  return -normal_quantile(tail);
}

BlurBoundCheck blur_bound_check(const PiecewiseConstantSignal& signal, const BlurModel& blur) {
  double max_nu = 0.0;
  for (int j = 0; j <= signal.regions(); ++j) {
    max_nu = std::max(max_nu, nu_threshold(abs(signal.step(j))));
  }
  BlurBoundCheck check;
  check.sigma_bound = 0.5 / max_nu;
  check.margin = check.sigma_bound - blur.max_sigma();
  check.satisfied = check.margin > 0.0;
  return check;
}

Matrix<double> deformation_matrix(const PiecewiseConstantSignal& signal, const BlurModel& blur,
                                  const SamplingGrid& grid) {
  Matrix<double> out(grid.count, signal.regions() + 1);
  for (int i = 0; i < grid.count; ++i) {
    for (int j = 0; j <= signal.regions(); ++j) {
      out(i, j) = blur.step_response(grid.time(i) - signal.discontinuity(j));
    }
  }
  return out;
}

const char* to_string(ColumnForm form) {
  switch (form) {
    case ColumnForm::kPure: return "pure";
    case ColumnForm::kFirst: return "F";
    case ColumnForm::kSecond: return "S";
  }
  return "?";
}

MeasurementMatrix measurement_matrix(const PiecewiseConstantSignal& signal, const BlurModel& blur,
                                     const SamplingGrid& grid, const QuantizedSequence& gamma) {
  grid.validate(signal);
  if (static_cast<int>(gamma.size()) != grid.count) {
    throw ValidationError("gamma has " + std::to_string(gamma.size()) + " samples, grid has " +
                          std::to_string(grid.count));
  }
  const auto bound = blur_bound_check(signal, blur);
  if (!bound.satisfied) {
    std::ostringstream os;
    os << "blur exceeds the small-blur bound: max sigma " << blur.max_sigma() << " >= "
       << bound.sigma_bound;
    throw RegimeError(os.str());
  }
  if (!(signal.min_spacing() > 2.0)) {
    throw RegimeError("discontinuities closer than 2T are outside the supported regime");
  }

  const int rows = grid.count;
  const int cols = signal.regions() + 1;
  const auto counts = region_counts(signal, grid);
  const double sigma = blur.max_sigma();

  MeasurementMatrix out;
  out.entries = Matrix<Rational>(rows, cols);
  Matrix<char> open(rows, cols, 0);
  std::vector<double> nu(static_cast<std::size_t>(cols));
  for (int j = 0; j < cols; ++j) nu[static_cast<std::size_t>(j)] = nu_threshold(abs(signal.step(j)));

  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double offset = grid.time(i) - signal.discontinuity(j);
      if (std::abs(offset) > nu[static_cast<std::size_t>(j)] * sigma) {
        out.entries(i, j) = offset > 0.0 ? kOne : kZero;
      } else {
        open(i, j) = 1;
      }
    }
  }

  for (int i = 0; i < rows; ++i) {
    int critical = -1;
    for (int j = 0; j < cols; ++j) {
      if (!open(i, j)) continue;
      if (critical >= 0) {
        throw RegimeError("row " + std::to_string(i) + " is inside two blur transitions");
      }
      critical = j;
    }
    if (critical < 0) continue;
    Rational rest(0);
    for (int j = 0; j < cols; ++j) {
      if (j != critical) rest += out.entries(i, j) * signal.step(j);
    }
    const Rational value = (gamma[static_cast<std::size_t>(i)].to_rational() - rest) /
                           signal.step(critical).to_rational();
    if (value < kZero || value > kOne) {
      throw RegimeError("critical value " + format_rational(value) + " at (" + std::to_string(i) +
                        ", " + std::to_string(critical) + ") falls outside [0, 1]");
    }
    out.entries(i, critical) = value;
  }

  for (int j = 0; j < cols; ++j) {
    int critical_row = -1;
    for (int i = 0; i < rows; ++i) {
      if (strictly_inside_unit(out.entries(i, j))) {
        if (critical_row >= 0) {
          throw RegimeError("column " + std::to_string(j) + " holds two critical values");
        }
        critical_row = i;
      }
    }
    int first_one = rows;
    for (int i = 0; i < rows; ++i) {
      if (out.entries(i, j) == kOne) {
        first_one = i;
        break;
      }
    }
    const int zero_until = critical_row >= 0 ? critical_row : first_one;
    for (int i = 0; i < rows; ++i) {
      const auto& e = out.entries(i, j);
      const bool ok = (i < zero_until && e == kZero) || (i == critical_row) ||
                      (i > zero_until && e == kOne) || (i == zero_until && e == kOne);
      if (!ok) {
        throw RegimeError("column " + std::to_string(j) + " is not a monotone 0/1 step");
      }
    }

    ColumnForm form = ColumnForm::kPure;
    int iota = first_one;
    if (critical_row >= 0) {
      const auto& c = out.entries(critical_row, j);
      if (c > kHalf) {
        form = ColumnForm::kFirst;
        iota = critical_row;
      } else if (c < kHalf) {
        form = ColumnForm::kSecond;
        iota = critical_row + 1;
      } else {
        throw RegimeError("critical value 1/2 in column " + std::to_string(j) +
                          " matches no column form");
      }
    }
    if (iota != counts.iota[static_cast<std::size_t>(j)]) {
      throw RegimeError("column " + std::to_string(j) + " places its step at row " +
                        std::to_string(iota) + " but the first sample after D_" +
                        std::to_string(j) + " is " +
                        std::to_string(counts.iota[static_cast<std::size_t>(j)]));
    }
    out.column_forms.push_back(form);
    out.critical_rows.push_back(critical_row);
    out.iota.push_back(iota);
  }

  const auto product = multiply(out.entries, difference_vector(signal));
  for (int i = 0; i < rows; ++i) {
    if (product[static_cast<std::size_t>(i)] != gamma[static_cast<std::size_t>(i)].to_rational()) {
      throw RegimeError("row " + std::to_string(i) +
                        " rounds away from its plateau without a blur transition");
    }
  }
  return out;
}

bool is_saturated(const PiecewiseConstantSignal& signal, const BlurModel& blur,
                  const SamplingGrid& grid) {
  Q256 biggest(0);
  for (int j = 0; j <= signal.regions(); ++j) biggest = std::max(biggest, abs(signal.step(j)));
  const double limit =
      1.0 / (2.0 * static_cast<double>(signal.regions() + 1) * static_cast<double>(biggest.num));
  const auto dm = deformation_matrix(signal, blur, grid);
  for (int i = 0; i < dm.rows(); ++i) {
    for (int j = 0; j < dm.cols(); ++j) {
      if (!(std::abs(dm(i, j) - 0.5) < limit)) return false;
    }
  }
  return true;
}

double saturating_sigma(const PiecewiseConstantSignal& signal, const SamplingGrid& grid) {
  auto wide = [&](double sigma) { return is_saturated(signal, BlurModel::gaussian(sigma), grid); };
  double hi = 1.0;
  while (!wide(hi)) hi *= 2.0;
  double lo = hi / 2.0;
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    (wide(mid) ? hi : lo) = mid;
  }
  return hi;
}

Matrix<Rational> saturated_measurement_matrix(const PiecewiseConstantSignal& signal,
                                              const BlurModel& blur, const SamplingGrid& grid) {
  if (!is_saturated(signal, blur, grid)) {
    throw RegimeError("blur does not flatten every deformation entry to 1/2");
  }
  return Matrix<Rational>(grid.count, signal.regions() + 1, kHalf);
}

Matrix<Rational> no_blur_matrix(const PiecewiseConstantSignal& signal, const SamplingGrid& grid) {
  const auto counts = region_counts(signal, grid);
  Matrix<Rational> out(grid.count, signal.regions() + 1);
  for (int i = 0; i < grid.count; ++i) {
    for (int j = 0; j <= signal.regions(); ++j) {
      out(i, j) = i >= counts.iota[static_cast<std::size_t>(j)] ? kOne : kZero;
    }
  }
  return out;
}

Matrix<Rational> difference_matrix(const Matrix<Rational>& m) {
  Matrix<Rational> out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      out(i, j) = i == 0 ? m(i, j) : m(i, j) - m(i - 1, j);
    }
  }
  return out;
}

std::vector<Rational> multiply(const Matrix<Rational>& m, const std::vector<Q256>& v) {
  if (static_cast<int>(v.size()) != m.cols()) throw ValidationError("dimension mismatch");
  std::vector<Rational> out(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i) {
    Rational acc(0);
    for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

const char* to_string(ProductLabel label) {
  switch (label) {
    case ProductLabel::kZero: return "zero";
    case ProductLabel::kFull: return "full";
    case ProductLabel::kMajor: return "major";
    case ProductLabel::kMinor: return "minor";
  }
  return "?";
}

const char* to_string(ProductCase c) {
  switch (c) {
    case ProductCase::kNone: return "none";
    case ProductCase::kBeforeIota: return "before_iota";
    case ProductCase::kAtIotaClean: return "at_iota_clean";
    case ProductCase::kAtIotaAfterSplit: return "at_iota_after_split";
    case ProductCase::kAfterIota: return "after_iota";
  }
  return "?";
}

ProductClassification classify_product(const MeasurementMatrix& m,
                                       const Matrix<Rational>& difference,
                                       const PiecewiseConstantSignal& signal,
                                       const RegionCounts& counts) {
  const auto& M = m.entries;
  const int rows = M.rows();
  const int cols = M.cols();
  const auto direct = multiply(difference, difference_vector(signal));

  ProductClassification out;
  out.entries.resize(static_cast<std::size_t>(rows));
  std::vector<int> contributors(static_cast<std::size_t>(rows), 0);

  auto at = [&](int i, int j) -> Rational { return (i >= 0 && i < rows) ? M(i, j) : kZero; };
  auto add = [&](int i, int j, const Rational& value, ProductCase branch) {
    if (i < 0 || i >= rows || value == kZero) return;
    auto& e = out.entries[static_cast<std::size_t>(i)];
    ++contributors[static_cast<std::size_t>(i)];
    e.value += value;
    e.column = j;
    e.branch = branch;
    const auto form = m.column_forms[static_cast<std::size_t>(j)];
    if (form == ColumnForm::kPure) {
      e.label = ProductLabel::kFull;
    } else if (branch == ProductCase::kBeforeIota || branch == ProductCase::kAfterIota) {
      e.label = ProductLabel::kMinor;
    } else {
      e.label = ProductLabel::kMajor;
    }
  };

  for (int j = 0; j < cols; ++j) {
    const int iota = counts.iota[static_cast<std::size_t>(j)];
    const Rational step = signal.step(j).to_rational();
    add(iota - 1, j, at(iota - 1, j) * step, ProductCase::kBeforeIota);
    if (at(iota - 1, j) == kZero) {
      add(iota, j, at(iota, j) * step, ProductCase::kAtIotaClean);
    } else {
      add(iota, j, (kOne - at(iota - 1, j)) * step, ProductCase::kAtIotaAfterSplit);
    }
    if (iota + 1 < rows) add(iota + 1, j, (kOne - at(iota, j)) * step, ProductCase::kAfterIota);
  }

  for (int i = 0; i < rows; ++i) {
    const auto& e = out.entries[static_cast<std::size_t>(i)];
    const auto& d = direct[static_cast<std::size_t>(i)];
    if (contributors[static_cast<std::size_t>(i)] == 0 && d != kZero) {
      throw RegimeError("entry " + std::to_string(i) + " of M_D g_D is " + format_rational(d) +
                        " but no column form accounts for it");
    }
    if (contributors[static_cast<std::size_t>(i)] > 1) {
      out.violations.push_back("row " + std::to_string(i) + " receives mass from two steps");
    }
    if (e.value != d) {
      out.violations.push_back("entry " + std::to_string(i) + ": closed form " +
                               format_rational(e.value) + " != direct " + format_rational(d));
    }
  }

  auto value = [&](int i) -> Rational {
    return (i >= 0 && i < rows) ? out.entries[static_cast<std::size_t>(i)].value : kZero;
  };
  auto absr = [](const Rational& r) { return r < kZero ? -r : r; };

  for (int j = 0; j < cols; ++j) {
    const int iota = counts.iota[static_cast<std::size_t>(j)];
    if (iota >= rows || difference(iota, j) != kOne) continue;
    const bool before = value(iota - 1) != kZero;
    const bool after = value(iota + 1) != kZero;
    const std::string tag = "pure column " + std::to_string(j) + ": ";
    if (before && after) out.violations.push_back(tag + "both neighbours nonzero");
    if (before) {
      ++out.pure_neighbor_checks;
      if (j == 0 || !(signal.discontinuity(j) - signal.discontinuity(j - 1) < 2.5)) {
        out.violations.push_back(tag + "nonzero predecessor without a gap below 2.5T");
      }
      if (!(absr(value(iota - 2) + value(iota - 1)) > absr(value(iota)))) {
        out.violations.push_back(tag + "preceding split pair is not larger");
      }
    }
    if (after) {
      ++out.pure_neighbor_checks;
      if (j + 1 >= cols || !(signal.discontinuity(j + 1) - signal.discontinuity(j) < 2.5)) {
        out.violations.push_back(tag + "nonzero successor without a gap below 2.5T");
      }
      if (!(absr(value(iota + 1) + value(iota + 2)) > absr(value(iota)))) {
        out.violations.push_back(tag + "following split pair is not larger");
      }
    }
  }

  for (int j = 0; j + 1 < cols; ++j) {
    const int iota = counts.iota[static_cast<std::size_t>(j)];
    if (counts.iota[static_cast<std::size_t>(j + 1)] != iota + 2) continue;
    const bool both_second = at(iota - 1, j) > kZero && at(iota + 1, j + 1) > kZero;
    const bool both_first = iota < rows && iota + 2 < rows && at(iota, j) < kOne &&
                            at(iota + 2, j + 1) < kOne;
    if (both_second || both_first) {
      ++out.adjacent_split_checks;
      if (!(signal.discontinuity(j + 1) - signal.discontinuity(j) < 2.5)) {
        out.violations.push_back("columns " + std::to_string(j) + " and " + std::to_string(j + 1) +
                                 " split the same way without a gap below 2.5T");
      }
    }
  }
  return out;
}

std::string matrix_to_csv(const Matrix<Rational>& m) {
  std::ostringstream os;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << grid_string(m(i, j));
    }
    os << '\n';
  }
  return os.str();
}

std::string measurement_sidecar_json(const MeasurementMatrix& m) {
  nlohmann::ordered_json j;
  j["rows"] = m.entries.rows();
  j["cols"] = m.entries.cols();
  auto& columns = j["columns"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < m.column_forms.size(); ++c) {
    nlohmann::ordered_json col;
    col["j"] = c;
    col["form"] = to_string(m.column_forms[c]);
    col["iota"] = m.iota[c];
    if (m.critical_rows[c] >= 0) {
      col["critical_row"] = m.critical_rows[c];
      col["critical_value"] =
          format_rational(m.entries(m.critical_rows[c], static_cast<int>(c)));
    } else {
      col["critical_row"] = nullptr;
    }
    columns.push_back(col);
  }
  auto& rows = j["row_critical_columns"] = nlohmann::ordered_json::array();
  for (int i = 0; i < m.entries.rows(); ++i) {
    auto list = nlohmann::ordered_json::array();
    for (int c = 0; c < m.entries.cols(); ++c) {
      if (strictly_inside_unit(m.entries(i, c))) list.push_back(c);
    }
    rows.push_back(list);
  }
  return j.dump(2) + "\n";
}

}  // namespace blurreg
