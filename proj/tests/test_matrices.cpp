#include <doctest.h>

#include "blurreg/error.hpp"
#include "blurreg/matrices.hpp"
#include "oracles.hpp"

using namespace blurreg;

namespace {

const Q256 kOne = Q256::from_int(1);

PiecewiseConstantSignal example_signal() {
  return PiecewiseConstantSignal({kOne, -kOne, kOne, -kOne}, {0.0, 2.44, 5.01, 7.42, 9.43});
}

struct Built {
  MeasurementMatrix m;
  Matrix<Rational> md;
  RegionCounts counts;
};

Built build(double t0, double sigma = 0.125) {
  const auto s = example_signal();
  const auto blur = BlurModel::gaussian(sigma);
  const SamplingGrid grid{t0, 13};
  const auto gamma = sample_sequence(s, blur, grid);
  auto m = measurement_matrix(s, blur, grid, gamma);
  auto md = difference_matrix(m.entries);
  return {m, md, region_counts(s, grid)};
}

}  // namespace

TEST_SUITE("matrices") {

TEST_CASE("nu thresholds sit inside the published brackets") {
  struct Row {
    int step;
    double lo, hi;
  };
  const Row rows[] = {{1, 2.88, 2.89}, {2, 3.07, 3.1},   {4, 3.26, 3.3},   {8, 3.45, 3.49},
                      {16, 3.65, 3.7}, {32, 3.8, 3.85},  {64, 4.0, 4.05},  {128, 4.15, 4.2},
                      {256, 4.3, 4.35}, {512, 4.45, 4.5}};
  for (const auto& r : rows) {
    const double nu = nu_threshold(Q256::from_int(r.step));
    CHECK(nu > r.lo);
    CHECK(nu < r.hi);
    // Independent inversion of the series cdf.
    CHECK(std::abs(nu + oracle::normal_quantile(1.0 / (512.0 * r.step))) < 1e-9);
  }
  CHECK_THROWS_AS(nu_threshold(Q256(0)), ValidationError);
}

TEST_CASE("nu is strictly increasing in the step size") {
  double previous = 0.0;
  for (int k = 1; k <= 4096; k += 7) {
    const double nu = nu_threshold(Q256(k));
    CHECK(nu > previous);
    previous = nu;
  }
}

TEST_CASE("blur bound on the reference signal") {
  const auto s = example_signal();
  const auto ok = blur_bound_check(s, BlurModel::gaussian(0.125));
  CHECK(ok.satisfied);
  CHECK(ok.sigma_bound == doctest::Approx(0.5 / nu_threshold(Q256::from_int(2))));
  CHECK(ok.sigma_bound > 0.16);
  CHECK(ok.sigma_bound < 0.165);
  CHECK_FALSE(blur_bound_check(s, BlurModel::gaussian(0.2)).satisfied);
  CHECK(blur_bound_check(s, BlurModel::gaussian(1e-9)).satisfied);
  CHECK_FALSE(blur_bound_check(s, BlurModel({{Rational(1, 2), 0.01}, {Rational(1, 2), 0.2}})).satisfied);
}

TEST_CASE("deformation matrix entries") {
  const auto s = example_signal();
  const auto dm = deformation_matrix(s, BlurModel::gaussian(0.125), {-0.98, 13});
  CHECK(dm(1, 0) == doctest::Approx(oracle::normal_cdf(0.16)).epsilon(1e-13));
  CHECK(dm(1, 0) == doctest::Approx(0.5636).epsilon(1e-4));
  const auto twins = deformation_matrix(
      s, BlurModel({{Rational(1, 2), 0.125}, {Rational(1, 2), 0.125}}), {-0.98, 13});
  for (int i = 0; i < 13; ++i) {
    for (int j = 0; j < 5; ++j) CHECK(twins(i, j) == doctest::Approx(dm(i, j)).epsilon(1e-15));
  }
}

TEST_CASE("measurement matrix of the first reference grid") {
  const auto b = build(-0.98);
  const auto& M = b.m.entries;
  CHECK(M(1, 0) == Rational(144, 256));
  CHECK(M(0, 0) == Rational(0));
  for (int i = 2; i < 13; ++i) CHECK(M(i, 0) == Rational(1));
  CHECK(b.m.column_forms[0] == ColumnForm::kFirst);
  for (int i = 0; i <= 3; ++i) CHECK(M(i, 1) == Rational(0));
  for (int i = 4; i < 13; ++i) CHECK(M(i, 1) == Rational(1));
  CHECK(b.m.column_forms[1] == ColumnForm::kPure);
  CHECK(b.m.iota == std::vector<int>{1, 4, 6, 9, 11});
  // Column 2 holds the 136/256 critical value behind gamma[6] = 16/256.
  CHECK(M(6, 2) == Rational(136, 256));
}

TEST_CASE("second reference grid has non-1/256 critical values") {
  const auto b = build(-0.4);
  const auto& M = b.m.entries;
  CHECK(M(3, 1) == Rational(461, 512));
  CHECK(M(8, 3) == Rational(474, 512));
  CHECK(M(10, 4) == Rational(234, 256));
  const auto csv = matrix_to_csv(M);
  CHECK(csv.find("461/512") != std::string::npos);
  CHECK(csv.find("234/256") != std::string::npos);
}

TEST_CASE("difference matrix of the reference grid") {
  const auto b = build(-0.98);
  CHECK(b.md(1, 0) == Rational(144, 256));
  CHECK(b.md(2, 0) == Rational(112, 256));
  for (int i = 0; i < 13; ++i) {
    int nonzero = 0;
    for (int j = 0; j < 5; ++j) nonzero += b.md(i, j) != Rational(0);
    CHECK(nonzero <= 1);
  }
  // Column sums equal the last row of M.
  for (int j = 0; j < 5; ++j) {
    Rational sum(0);
    for (int i = 0; i < 13; ++i) sum += b.md(i, j);
    CHECK(sum == b.m.entries(12, j));
  }
}

TEST_CASE("product classification on the reference grid") {
  const auto s = example_signal();
  const auto b = build(-0.98);
  const auto p = classify_product(b.m, b.md, s, b.counts);
  CHECK(p.violations.empty());
  CHECK(p.entries[4].value == Rational(-2));
  CHECK(p.entries[4].label == ProductLabel::kFull);
  CHECK(p.entries[3].value == Rational(0));
  CHECK(p.entries[5].value == Rational(0));
  CHECK(p.entries[1].value == Rational(144, 256));
  CHECK(p.entries[1].label == ProductLabel::kMajor);
  CHECK(p.entries[2].value == Rational(112, 256));
  CHECK(p.entries[2].label == ProductLabel::kMinor);
  CHECK(p.entries[2].branch == ProductCase::kAfterIota);
  // The product equals the noiseless difference sequence.
  const auto direct = multiply(b.md, difference_vector(s));
  for (int i = 0; i < 13; ++i) CHECK(p.entries[static_cast<std::size_t>(i)].value == direct[static_cast<std::size_t>(i)]);
}

TEST_CASE("tiny blur gives the no-blur block matrix") {
  const auto s = example_signal();
  const SamplingGrid grid{-0.98, 13};
  const auto b = build(-0.98, 1e-4);
  CHECK(b.m.entries == no_blur_matrix(s, grid));
  const auto& md = b.md;
  const auto counts = region_counts(s, grid);
  for (int i = 0; i < 13; ++i) {
    for (int j = 0; j < 5; ++j) {
      CHECK(md(i, j) == Rational(i == counts.iota[static_cast<std::size_t>(j)] ? 1 : 0));
    }
  }
  const auto p = classify_product(b.m, md, s, counts);
  for (int i = 0; i < 13; ++i) {
    Rational want(0);
    for (int j = 0; j < 5; ++j) {
      if (counts.iota[static_cast<std::size_t>(j)] == i) want = s.step(j).to_rational();
    }
    CHECK(p.entries[static_cast<std::size_t>(i)].value == want);
  }
}

TEST_CASE("saturating blur flattens the matrix to one half") {
  const auto s = example_signal();
  const SamplingGrid grid{-0.98, 13};
  const double sigma = saturating_sigma(s, grid);
  CHECK(is_saturated(s, BlurModel::gaussian(sigma), grid));
  CHECK_FALSE(is_saturated(s, BlurModel::gaussian(sigma * 0.9), grid));
  const auto M = saturated_measurement_matrix(s, BlurModel::gaussian(sigma), grid);
  CHECK(M == Matrix<Rational>(13, 5, Rational(1, 2)));
  const auto gamma = sample_sequence(s, BlurModel::gaussian(sigma), grid);
  CHECK(gamma == std::vector<Q256>(13, Q256(0)));
  for (const auto& r : multiply(M, difference_vector(s))) CHECK(r == Rational(0));
  const auto md = difference_matrix(M);
  for (int j = 0; j < 5; ++j) {
    CHECK(md(0, j) == Rational(1, 2));
    for (int i = 1; i < 13; ++i) CHECK(md(i, j) == Rational(0));
  }
  CHECK_THROWS_AS(saturated_measurement_matrix(s, BlurModel::gaussian(0.125), grid), RegimeError);
}

TEST_CASE("regime rejections") {
  const auto s = example_signal();
  const SamplingGrid grid{-0.98, 13};
  const auto wide = BlurModel::gaussian(0.2);
  CHECK_THROWS_AS(measurement_matrix(s, wide, grid, sample_sequence(s, wide, grid)), RegimeError);
  const PiecewiseConstantSignal close({kOne, -kOne}, {0.0, 1.9, 5.3});
  const auto blur = BlurModel::gaussian(0.05);
  const SamplingGrid g2{-0.5, 8};
  CHECK_THROWS_AS(measurement_matrix(close, blur, g2, sample_sequence(close, blur, g2)), RegimeError);
}

TEST_CASE("critical value of exactly one half is rejected") {
  // Sample 0 sits 0.001 before D_0; a reading of 128/256 there forces M(0, 0) = 1/2.
  const PiecewiseConstantSignal s({kOne}, {0.0, 3.3});
  const SamplingGrid grid{-1e-3, 6};
  const auto blur = BlurModel::gaussian(0.1);
  const std::vector<Q256> gamma{Q256(128), Q256(256), Q256(256), Q256(256), Q256(0), Q256(0)};
  CHECK_THROWS_AS(measurement_matrix(s, blur, grid, gamma), RegimeError);
  CHECK_NOTHROW(measurement_matrix(s, blur, grid, sample_sequence(s, blur, grid)));
}

TEST_CASE("sidecar json lists forms and critical values") {
  const auto b = build(-0.98);
  const auto sidecar = measurement_sidecar_json(b.m);
  CHECK(sidecar.find("\"form\": \"F\"") != std::string::npos);
  CHECK(sidecar.find("\"critical_value\": \"9/16\"") != std::string::npos);
}

}  // TEST_SUITE
