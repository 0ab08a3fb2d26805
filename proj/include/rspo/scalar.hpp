#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <type_traits>

namespace rspo {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Every estimator and analytic routine is a template over the arithmetic
// type. `double` is the production path; `Rational` gives exact results
// for identity and unbiasedness checks.
template <class S>
concept Scalar = std::is_same_v<S, double> || std::is_same_v<S, Rational>;

template <Scalar S>
inline double to_double(const S& v) {
  if constexpr (std::is_same_v<S, double>) {
    return v;
  } else {
    return v.template convert_to<double>();
  }
}

template <Scalar S>
inline bool is_finite(const S& v) {
  if constexpr (std::is_same_v<S, double>) {
    return std::isfinite(v);
  } else {
    return true;
  }
}

// base^exp for exp >= 0, with 0^0 = 1.
template <Scalar S>
inline S ipow(const S& base, std::int64_t exp) {
  S result(1);
  for (std::int64_t i = 0; i < exp; ++i) result *= base;
  return result;
}

template <Scalar S>
inline S abs_value(const S& v) {
  return v < S(0) ? S(-v) : v;
}

}  // namespace rspo
