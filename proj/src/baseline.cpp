#include "blurreg/baseline.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <sstream>

#include "blurreg/error.hpp"

namespace blurreg {

NoiseSpec NoiseSpec::from_seed(Q256 magnitude, int count, std::uint64_t seed) {
  NoiseSpec spec{magnitude, {}};
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < count; ++i) spec.signs.push_back(coin(rng) ? 1 : -1);
  return spec;
}

void NoiseSpec::validate(std::size_t count) const {
  if (magnitude < Q256(0) || magnitude > Q256(128)) {
    throw ValidationError("noise magnitude must lie in [0, 1/2]");
  }
  if (signs.size() != count) {
    throw ValidationError("noise has " + std::to_string(signs.size()) + " signs for " +
                          std::to_string(count) + " samples");
  }
  for (int s : signs) {
    if (s != 1 && s != -1) throw ValidationError("noise signs must be +1 or -1");
  }
}

QuantizedSequence apply_noise(const QuantizedSequence& gamma, const NoiseSpec& spec) {
  spec.validate(gamma.size());
  QuantizedSequence y(gamma.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    y[i] = gamma[i] + spec.signs[i] * spec.magnitude;
  }
  return y;
}

std::vector<Q256> difference_sequence(const QuantizedSequence& y) {
  std::vector<Q256> d(y.size());
  Q256 previous(0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    d[i] = y[i] - previous;
    previous = y[i];
  }
  return d;
}

QuantizedSequence prefix_sum(const std::vector<Q256>& d) {
  QuantizedSequence y(d.size());
  Q256 running(0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    running += d[i];
    y[i] = running;
  }
  return y;
}

namespace {

template <typename T, typename In, typename Mul>
Correlation<T> correlate(const std::vector<In>& y1, const std::vector<In>& y2, Mul mul) {
  Correlation<T> r;
  const int n1 = static_cast<int>(y1.size());
  const int n2 = static_cast<int>(y2.size());
  if (n1 == 0 || n2 == 0) return r;
  r.min_lag = -(n1 - 1);
  r.values.assign(static_cast<std::size_t>(n1 + n2 - 1), T(0));
  for (int k = r.min_lag; k <= n2 - 1; ++k) {
    T acc(0);
    for (int i = std::max(0, -k); i < n1 && i + k < n2; ++i) {
      acc += mul(y1[static_cast<std::size_t>(i)], y2[static_cast<std::size_t>(i + k)]);
    }
    r.values[static_cast<std::size_t>(k - r.min_lag)] = acc;
  }
  return r;
}

}  // namespace

Correlation<std::int64_t> cross_correlation(const QuantizedSequence& y1,
                                            const QuantizedSequence& y2) {
  return correlate<std::int64_t>(y1, y2, [](Q256 a, Q256 b) { return a.num * b.num; });
}

Correlation<Rational> cross_correlation(const std::vector<Rational>& y1,
                                        const std::vector<Rational>& y2) {
  return correlate<Rational>(y1, y2, [](const Rational& a, const Rational& b) { return a * b; });
}

template <typename T>
ArgmaxResult ccorr_argmax(const Correlation<T>& r) {
  ArgmaxResult out;
  if (r.values.empty()) return out;
  const T best = *std::max_element(r.values.begin(), r.values.end());
  for (int lag = r.min_lag; lag <= r.max_lag(); ++lag) {
    if (r.at(lag) == best) out.tied.push_back(lag);
  }
  std::sort(out.tied.begin(), out.tied.end(), [](int a, int b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return a < b;
  });
  out.lag = out.tied.front();
  return out;
}

template ArgmaxResult ccorr_argmax(const Correlation<std::int64_t>&);
template ArgmaxResult ccorr_argmax(const Correlation<Rational>&);

std::string correlation_to_csv(const Correlation<std::int64_t>& r) {
  std::ostringstream os;
  os << "lag,numerator,denominator\n";
  for (int lag = r.min_lag; lag <= r.max_lag(); ++lag) {
    const Rational v(r.at(lag), Q256::kDenominator * Q256::kDenominator);
    os << lag << ',' << v.numerator() << ',' << v.denominator() << '\n';
  }
  return os.str();
}

}  // namespace blurreg
