#pragma once

#include <cstdint>
#include <cstdlib>
#include <compare>
#include <string>

#include <boost/rational.hpp>

namespace blurreg {

using Rational = boost::rational<std::int64_t>;

/// Integer multiple of 1/256. Amplitudes, samples, noise and difference
/// sequences all live on this grid.
struct Q256 {
  static constexpr std::int64_t kDenominator = 256;

  std::int64_t num = 0;

  constexpr Q256() = default;
  constexpr explicit Q256(std::int64_t numerator) : num(numerator) {}

  static constexpr Q256 from_int(std::int64_t whole) { return Q256(whole * kDenominator); }

  constexpr double to_double() const { return static_cast<double>(num) / kDenominator; }
  Rational to_rational() const { return Rational(num, kDenominator); }

  constexpr bool is_zero() const { return num == 0; }

  friend constexpr Q256 operator+(Q256 a, Q256 b) { return Q256(a.num + b.num); }
  friend constexpr Q256 operator-(Q256 a, Q256 b) { return Q256(a.num - b.num); }
  friend constexpr Q256 operator-(Q256 a) { return Q256(-a.num); }
  friend constexpr Q256 operator*(std::int64_t k, Q256 a) { return Q256(k * a.num); }
  Q256& operator+=(Q256 o) { num += o.num; return *this; }
  Q256& operator-=(Q256 o) { num -= o.num; return *this; }

  friend constexpr bool operator==(Q256, Q256) = default;
  friend constexpr auto operator<=>(Q256, Q256) = default;
};

constexpr Q256 abs(Q256 q) { return Q256(q.num < 0 ? -q.num : q.num); }

inline Rational operator*(const Rational& r, Q256 q) { return r * q.to_rational(); }
inline Rational operator*(Q256 q, const Rational& r) { return r * q.to_rational(); }

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// "num/den" in lowest terms; integers print without a denominator only
/// when `compact` is set.
std::string format_rational(const Rational& r, bool compact = false);

/// "num/256" (never reduced) so that golden files stay on one grid.
std::string format_q256(Q256 q);

/// Accepts "a/b", "a" or a decimal like "0.5" (converted exactly when the
/// decimal is dyadic or terminates). Throws ValidationError on junk.
Rational parse_rational(const std::string& text);

}  // namespace blurreg
