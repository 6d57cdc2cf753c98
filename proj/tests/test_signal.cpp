#include <doctest.h>

#include <random>

#include "blurreg/error.hpp"
#include "blurreg/normal.hpp"
#include "blurreg/signal.hpp"
#include "oracles.hpp"

using namespace blurreg;

namespace {

const Q256 kOne = Q256::from_int(1);

PiecewiseConstantSignal example_signal() {
  return PiecewiseConstantSignal({kOne, -kOne, kOne, -kOne}, {0.0, 2.44, 5.01, 7.42, 9.43});
}

std::vector<Q256> nums(std::initializer_list<int> xs) {
  std::vector<Q256> out;
  for (int x : xs) out.emplace_back(x);
  return out;
}

}  // namespace

TEST_SUITE("signal") {

TEST_CASE("normal cdf agrees with a series evaluation to 1e-14") {
  for (double z = -8.0; z <= 8.0; z += 0.0137) {
    CHECK(std::abs(normal_cdf(z) - oracle::normal_cdf(z)) <= 1e-14);
  }
  CHECK(normal_cdf(0.0) == 0.5);
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double p : {1e-12, 1e-6, 1.0 / 512, 0.01, 0.3, 0.5, 0.77, 0.999, 1 - 1e-9}) {
    const double z = normal_quantile(p);
    CHECK(std::abs(z - oracle::normal_quantile(p)) <= 1e-10);
  }
}

TEST_CASE("eval_signal reads plateaus and zero outside the support") {
  const auto s = example_signal();
  CHECK(eval_signal(s, 1.0) == kOne);
  CHECK(eval_signal(s, -0.5) == Q256(0));
  CHECK(eval_signal(s, 2.44) == -kOne);
  CHECK(eval_signal(s, 9.43) == Q256(0));
}

TEST_CASE("eval_blurred follows the closed form") {
  const auto s = example_signal();
  const auto blur = BlurModel::gaussian(0.125);
  // Sum of the five step responses evaluated with the series cdf.
  auto reference = [&](double t) {
    double acc = 0;
    for (int j = 0; j <= s.regions(); ++j) {
      acc += s.step(j).to_double() * oracle::normal_cdf((t - s.discontinuity(j)) / 0.125);
    }
    return acc;
  };
  CHECK(eval_blurred(s, blur, 0.02) == doctest::Approx(reference(0.02)).epsilon(1e-14));
  CHECK(eval_blurred(s, blur, 0.02) == doctest::Approx(0.56356).epsilon(1e-4));
  CHECK(eval_blurred(s, blur, 5.02) == doctest::Approx(0.0638).epsilon(1e-3));
  // Very wide blur: every cdf near 1/2 and the steps telescope to zero.
  CHECK(std::abs(eval_blurred(s, BlurModel::gaussian(1e6), 3.0)) < 1e-5);
}

TEST_CASE("single-component mixture equals the pure gaussian") {
  const auto s = example_signal();
  const BlurModel mix({{Rational(1), 0.11}});
  const BlurModel twins({{Rational(1, 2), 0.11}, {Rational(1, 2), 0.11}});
  for (double t = -1.0; t < 11.0; t += 0.173) {
    const double pure = eval_blurred(s, BlurModel::gaussian(0.11), t);
    CHECK(std::abs(eval_blurred(s, mix, t) - pure) <= 1e-14);
    CHECK(std::abs(eval_blurred(s, twins, t) - pure) <= 1e-14);
  }
}

TEST_CASE("quantize rounds to the nearest 1/256 with ties to even") {
  CHECK(quantize(0.56356) == Q256(144));
  CHECK(quantize(0.0) == Q256(0));
  CHECK(quantize(3.0 / 512) == Q256(2));
  CHECK(quantize(1.0 / 512) == Q256(0));
  CHECK(quantize(-3.0 / 512) == Q256(-2));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 2000; ++k) {
    const double x = u(rng);
    bool tie = false;
    const auto want = oracle::quantize(x, &tie);
    if (!tie) CHECK(quantize(x) == want);
    CHECK(quantize(quantize(x).to_double()) == quantize(x));
  }
}

TEST_CASE("sample_sequence reproduces both reference sequences exactly") {
  const auto s = example_signal();
  const auto blur = BlurModel::gaussian(0.125);
  CHECK(sample_sequence(s, blur, {-0.98, 13}) ==
        nums({0, 144, 256, 256, -256, -256, 16, 256, 256, -256, -256, 0, 0}));
  CHECK(sample_sequence(s, blur, {-0.4, 13}) ==
        nums({0, 256, 256, -205, -256, -256, 256, 256, -218, -256, -22, 0, 0}));
}

TEST_CASE("saturating blur gives the all-zero sequence") {
  const auto s = example_signal();
  const auto gamma = sample_sequence(s, BlurModel::gaussian(1e5), {-0.98, 13});
  CHECK(gamma == std::vector<Q256>(13, Q256(0)));
}

TEST_CASE("difference_vector telescopes") {
  const auto s = example_signal();
  const auto g = difference_vector(s);
  CHECK(g == nums({256, -512, 512, -512, 256}));
  Q256 sum(0);
  for (auto q : g) sum += q;
  CHECK(sum == Q256(0));
  CHECK(difference_vector(PiecewiseConstantSignal({kOne}, {0.0, 3.0})) == nums({256, -256}));
}

TEST_CASE("region_counts matches direct counting") {
  const auto s = example_signal();
  const auto a = region_counts(s, {-0.98, 13});
  CHECK(a.eta == std::vector<int>{1, 3, 2, 3, 2, 2});
  CHECK(a.iota == std::vector<int>{1, 4, 6, 9, 11});
  const auto b = region_counts(s, {-0.4, 13});
  CHECK(b.eta == std::vector<int>{1, 2, 3, 2, 2, 3});
  CHECK(b.iota == std::vector<int>{1, 3, 6, 8, 10});
  CHECK(b.iota == oracle::iota(s, -0.4, 13));
  int total = 0;
  for (int e : b.eta) total += e;
  CHECK(total == 13);
}

TEST_CASE("signal invariants are enforced") {
  CHECK_THROWS_AS(PiecewiseConstantSignal({Q256(0), kOne}, {0.0, 3.0, 6.0}), ValidationError);
  CHECK_THROWS_AS(PiecewiseConstantSignal({kOne, Q256(0)}, {0.0, 3.0, 6.0}), ValidationError);
  CHECK_THROWS_AS(PiecewiseConstantSignal({kOne, kOne}, {0.0, 3.0, 6.0}), ValidationError);
  CHECK_THROWS_AS(PiecewiseConstantSignal({kOne}, {0.5, 3.0}), ValidationError);
  CHECK_THROWS_AS(PiecewiseConstantSignal({kOne, -kOne}, {0.0, 3.0, 3.0}), ValidationError);
  CHECK_THROWS_AS(PiecewiseConstantSignal({Q256::from_int(300)}, {0.0, 3.0}), ValidationError);
  CHECK_NOTHROW(PiecewiseConstantSignal({Q256::from_int(300)}, {0.0, 3.0}, Q256::from_int(512)));
}

TEST_CASE("blur weights must sum to one") {
  CHECK_THROWS_AS(BlurModel({{Rational(1, 2), 0.1}}), ValidationError);
  CHECK_THROWS_AS(BlurModel({{Rational(1), -0.1}}), ValidationError);
  CHECK_THROWS_AS(BlurModel({}), ValidationError);
  CHECK_NOTHROW(BlurModel({{Rational(1, 64), 1e-6}, {Rational(63, 64), 0.1}}));
}

TEST_CASE("grid validation") {
  const auto s = example_signal();
  CHECK_THROWS_AS(SamplingGrid({0.0, 13}).validate(s), ValidationError);
  CHECK_THROWS_AS(SamplingGrid({-0.98, 10}).validate(s), ValidationError);
  CHECK_THROWS_AS(SamplingGrid({-0.56, 13}).validate(s), ValidationError);  // lands on 2.44
  const PiecewiseConstantSignal integer_gap({kOne, -kOne}, {0.0, 3.0, 6.5});
  CHECK_THROWS_AS(SamplingGrid({-0.5, 9}).validate(integer_gap), ValidationError);
  CHECK_THROWS_AS(sample_sequence(s, BlurModel::gaussian(0.1), {-0.98, 10}), ValidationError);
}

}  // TEST_SUITE
