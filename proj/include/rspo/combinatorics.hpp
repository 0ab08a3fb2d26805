#pragma once

#include "rspo/scalar.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rspo {

/// Exact binomial coefficient C(n, k). C(n, k) = 0 when k > n.
inline BigInt binom(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0) {
    throw std::invalid_argument("binom: arguments must be non-negative (n=" + std::to_string(n) +
                                ", k=" + std::to_string(k) + ")");
  }
  if (k > n) return BigInt(0);
  if (k > n - k) k = n - k;
  BigInt result(1);
  for (std::int64_t i = 1; i <= k; ++i) {
    result *= (n - k + i);
    result /= i;  // exact: result is C(n-k+i, i) after this step
  }
  return result;
}

/// C(n, k) in the requested arithmetic. The double path multiplies
/// successive ratios and is exact while the result fits in 53 bits.
template <Scalar S = double>
inline S binom_as(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0) {
    throw std::invalid_argument("binom_as: arguments must be non-negative");
  }
  if (k > n) return S(0);
  if constexpr (std::is_same_v<S, Rational>) {
    return Rational(binom(n, k));
  } else {
    if (k > n - k) k = n - k;
    double result = 1.0;
    for (std::int64_t i = 1; i <= k; ++i) {
      result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return result;
  }
}

/// C(n - c, k - 1) / C(n - 1, k - 1) as prod_{i=0}^{k-2} (n - c - i) / (n - 1 - i).
///
/// Never forms either binomial, so it cannot overflow for any n that fits
/// an index. Returns exactly 0 when n - c < k - 1 and exactly 1 when k = 1.
template <Scalar S = double>
inline S binom_ratio_product(std::int64_t n, std::int64_t c, std::int64_t k) {
  if (n < 1) throw std::invalid_argument("binom_ratio_product: n must be >= 1");
  if (c < 0 || c > n) {
    throw std::invalid_argument("binom_ratio_product: c must lie in [0, n] (c=" + std::to_string(c) +
                                ", n=" + std::to_string(n) + ")");
  }
  if (k < 1 || k > n) {
    throw std::invalid_argument("binom_ratio_product: k must lie in [1, n] (k=" + std::to_string(k) +
                                ", n=" + std::to_string(n) + ")");
  }
  if (n - c < k - 1) return S(0);
  S result(1);
  for (std::int64_t i = 0; i <= k - 2; ++i) {
    result *= S(n - c - i) / S(n - 1 - i);
  }
  return result;
}

/// sum_{j=k-1}^{i-1} C(j-1, k-2). Equals C(i-1, k-1) (hockey-stick).
inline BigInt hockey_stick_sum(std::int64_t i, std::int64_t k) {
  if (k < 2) throw std::invalid_argument("hockey_stick_sum: k must be >= 2");
  if (i < 0) throw std::invalid_argument("hockey_stick_sum: i must be >= 0");
  BigInt sum(0);
  for (std::int64_t j = k - 1; j <= i - 1; ++j) sum += binom(j - 1, k - 2);
  return sum;
}

struct BinomSpec {
  std::int64_t top = 0;
  std::int64_t choose = 0;
};

/// The ratio C(n - c, k - 1) / C(n - 1, k - 1) together with its operands.
struct BinomRatio {
  BinomSpec numerator;
  BinomSpec denominator;
  double value = 0.0;

  Rational exact() const {
    return Rational(binom(numerator.top, numerator.choose)) /
           Rational(binom(denominator.top, denominator.choose));
  }
};

inline BinomRatio make_binom_ratio(std::int64_t n, std::int64_t c, std::int64_t k) {
  BinomRatio r;
  r.value = binom_ratio_product<double>(n, c, k);
  r.numerator = {n - c, k - 1};
  r.denominator = {n - 1, k - 1};
  return r;
}

}  // namespace rspo
