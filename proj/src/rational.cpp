#include "blurreg/rational.hpp"

#include <cctype>
#include <limits>

#include "blurreg/error.hpp"

namespace blurreg {

std::string format_rational(const Rational& r, bool compact) {
  if (compact && r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string format_q256(Q256 q) { return std::to_string(q.num) + "/256"; }

namespace {

std::int64_t parse_integer(const std::string& text, const std::string& whole) {
  if (text.empty()) throw ValidationError("malformed rational '" + whole + "'");
  std::size_t pos = 0;
  if (text[0] == '+' || text[0] == '-') pos = 1;
  if (pos == text.size()) throw ValidationError("malformed rational '" + whole + "'");
  for (std::size_t i = pos; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      throw ValidationError("malformed rational '" + whole + "'");
    }
  }
  try {
    return std::stoll(text);
  } catch (const std::out_of_range&) {
    throw ValidationError("rational component out of range in '" + whole + "'");
  }
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const auto num = parse_integer(text.substr(0, slash), text);
    const auto den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw ValidationError("zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(parse_integer(text, text));

  const std::string int_part = text.substr(0, dot);
  const std::string frac_part = text.substr(dot + 1);
  if (frac_part.size() > 15) throw ValidationError("too many decimals in '" + text + "'");
  const bool negative = !int_part.empty() && int_part[0] == '-';
  const std::string digits = (int_part.empty() || int_part == "-" || int_part == "+")
                                 ? std::string("0")
                                 : int_part;
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
  const auto whole = parse_integer(digits, text);
  const auto frac = frac_part.empty() ? 0 : parse_integer(frac_part, text);
  if (frac < 0) throw ValidationError("malformed rational '" + text + "'");
  const auto magnitude = Rational(whole < 0 ? -whole : whole) + Rational(frac, scale);
  return negative ? -magnitude : magnitude;
}

}  // namespace blurreg
