#pragma once

// Gradient-weight estimators for the Max@k objective.
//
// All weights are returned in the original sample order. For a sorted
// sample R_(1) <= ... <= R_(n), the unbiased weight of position i is
//
//   k [ R_(i) C(c_<[i], k-1)/C(n-1, k-1)
//       - (k-1)/(n-1) sum_{j <= c_<[i]} R_(j) C(j-1, k-2)/C(n-2, k-2) ]
//
// which, by the hockey-stick identity, equals
//
//   k(k-1)/(n-1) sum_{j <= c_<[i]} (R_(i) - R_(j)) C(j-1, k-2)/C(n-2, k-2).
//
// The second form is what exact_rspo_maxk_weights evaluates: every term is
// non-negative, so the result is non-negative in floating point too.

#include "rspo/combinatorics.hpp"
#include "rspo/types.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rspo {

/// Counts feeding the unbiased estimate of P_<^a * P_<=^b.
struct ProductPowerQuery {
  std::int64_t n0 = 0;    // samples available
  std::int64_t c_lt = 0;  // samples strictly below the reference reward
  std::int64_t c_eq = 0;  // samples tied with the reference (reference excluded)
  std::int64_t a = 0;     // exponent of P_<
  std::int64_t b = 0;     // exponent of P_<=
};

/// C(c_<, a) C(c_< + c_= - a, b) / (C(n0, a+b) C(a+b, a)): choose a strictly
/// smaller samples for the P_< factors and b at-or-below samples from the rest.
template <Scalar S = double>
S product_power_estimate(const ProductPowerQuery& q) {
  if (q.a < 0 || q.b < 0 || q.c_lt < 0 || q.c_eq < 0) {
    throw std::invalid_argument("product_power_estimate: negative count or exponent");
  }
  if (q.c_lt + q.c_eq > q.n0) throw std::invalid_argument("product_power_estimate: c_lt + c_eq exceeds n0");
  if (q.n0 < q.a + q.b) {
    throw std::invalid_argument("product_power_estimate: need n0 >= a + b (n0=" + std::to_string(q.n0) +
                                ", a+b=" + std::to_string(q.a + q.b) + ")");
  }
  if (q.a > q.c_lt) return S(0);
  return binom_as<S>(q.c_lt, q.a) * binom_as<S>(q.c_lt + q.c_eq - q.a, q.b) /
         (binom_as<S>(q.n0, q.a + q.b) * binom_as<S>(q.a + q.b, q.a));
}

/// (m+1)/(c_=+1) [C(c_<+c_=+1, m+1) - C(c_<, m+1)]
/// = sum_{a=0}^m C(c_<, a) C(c_<+c_=-a, m-a) / C(m, a).
inline Rational lemma2_closed_form(std::int64_t c_lt, std::int64_t c_eq, std::int64_t m) {
  if (c_lt < 0 || c_eq < 0 || m < 0) throw std::invalid_argument("lemma2_closed_form: inputs must be >= 0");
  return Rational(m + 1, c_eq + 1) * Rational(binom(c_lt + c_eq + 1, m + 1) - binom(c_lt, m + 1));
}

/// Closed form of sum_{a=0}^m (a+1) C(c_<, a) C(c_<+c_=-a, m-a) / C(m, a).
inline Rational lemma3_closed_form(std::int64_t c_lt, std::int64_t c_eq, std::int64_t m) {
  if (c_lt < 0 || c_eq < 0 || m < 0) throw std::invalid_argument("lemma3_closed_form: inputs must be >= 0");
  const Rational c_m(binom(c_lt, m));
  const Rational first = Rational((m + 1) * (m + 2), (c_eq + 1) * (c_eq + 2)) * Rational(binom(c_lt + c_eq + 2, m + 2));
  const Rational second = Rational((c_lt + 1) * (c_lt - m), c_eq + 1) * c_m;
  const Rational third = Rational((c_lt - m) * (c_lt - m - 1), c_eq + 2) * c_m;
  return first - second + third;
}

namespace detail {

inline void check_maxk_args(std::size_t n, int k, const char* who) {
  if (k < 1) throw std::invalid_argument(std::string(who) + ": k must be >= 1");
  if (n < static_cast<std::size_t>(k)) {
    throw std::invalid_argument(std::string(who) + ": need n >= k (n=" + std::to_string(n) +
                                ", k=" + std::to_string(k) + ")");
  }
}

// k(k-1)/(n-1) sum_{q < below} (R_(p) - R_(q)) C(q, k-2)/C(n-2, k-2), with
// `below` the number of sorted positions counted as strictly lower and q
// zero-based (so C(q, k-2) is C(j-1, k-2) for j = q+1).
template <Scalar S>
std::vector<S> difference_form_weights(const std::vector<S>& sorted_rewards, const std::vector<std::size_t>& below,
                                       int k) {
  const auto n = static_cast<std::int64_t>(sorted_rewards.size());
  std::vector<S> w(sorted_rewards.size(), S(0));
  if (k == 1) return sorted_rewards;

  // ratio[q] = C(q, k-2) / C(n-2, k-2) = binom_ratio_product(n-1, n-1-q, k-1)
  std::vector<S> ratio(sorted_rewards.size(), S(0));
  for (std::int64_t q = 0; q <= n - 1; ++q) ratio[q] = binom_ratio_product<S>(n - 1, n - 1 - q, k - 1);

  const S scale = S(k) * S(k - 1) / S(n - 1);
  for (std::size_t p = 0; p < sorted_rewards.size(); ++p) {
    if (below[p] + 1 < static_cast<std::size_t>(k)) continue;  // c_< < k-1
    S acc(0);
    for (std::size_t q = 0; q < below[p]; ++q) acc += (sorted_rewards[p] - sorted_rewards[q]) * ratio[q];
    w[p] = scale * acc;
  }
  return w;
}

}  // namespace detail

/// Unbiased Max@k weights for arbitrary (possibly tied) rewards.
template <Scalar S>
WeightVector<S> exact_rspo_maxk_weights(const SortedSample<S>& sorted, int k) {
  detail::check_maxk_args(sorted.size(), k, "exact_rspo_maxk_weights");
  WeightVector<S> out;
  out.estimator_tag = "rspo_maxk_exact";
  out.weights = sorted.unsort(detail::difference_form_weights(sorted.sorted_rewards, sorted.c_lt, k));
  return out;
}

template <Scalar S>
WeightVector<S> exact_rspo_maxk_weights(const RewardSample<S>& sample, int k) {
  return exact_rspo_maxk_weights(sort_sample(sample), k);
}

enum class TieHandling {
  reject,           // ties are an error
  by_sample_order,  // tied responses are ranked by their position in the sample
};

/// Max@k weights that rank responses by sorted position i rather than by
/// c_<[i]. Identical to the exact estimator when all rewards are distinct,
/// and also under by_sample_order: a tied lower response enters the
/// difference form with R_i - R_j = 0.
template <Scalar S>
WeightVector<S> approx_rspo_maxk_weights(const SortedSample<S>& sorted, int k,
                                         TieHandling ties = TieHandling::reject) {
  detail::check_maxk_args(sorted.size(), k, "approx_rspo_maxk_weights");
  if (ties == TieHandling::reject && sorted.has_ties()) {
    throw std::invalid_argument(
        "approx_rspo_maxk_weights: tied rewards present; use exact_rspo_maxk_weights for tied rewards");
  }
  std::vector<std::size_t> position(sorted.size());
  for (std::size_t p = 0; p < position.size(); ++p) position[p] = p;

  WeightVector<S> out;
  out.estimator_tag = "rspo_maxk_approx";
  out.weights = sorted.unsort(detail::difference_form_weights(sorted.sorted_rewards, position, k));
  return out;
}

template <Scalar S>
WeightVector<S> approx_rspo_maxk_weights(const RewardSample<S>& sample, int k,
                                         TieHandling ties = TieHandling::reject) {
  return approx_rspo_maxk_weights(sort_sample(sample), k, ties);
}

/// Unbiased Max@k weights assembled term by term, summing over t = 1..k
/// with product_power_estimate:
///
///   R_i sum_{t=1}^{k} PP(n-1; c_<, c_=; t-1, k-t)
///   - R_i c_=/(n-1) sum_{t=1}^{k-1} t PP(n-2; c_<, c_= - 1; t-1, k-t-1)      tied peers
///   - k/(n-1) sum_{j: R_j < R_i} R_j sum_{t=1}^{k-1} PP(n-2; c_<[j], c_=[j]; t-1, k-t-1)
///
/// Each PP uses the samples left after removing the response(s) it is
/// attached to. O(n^2 k); exact_rspo_maxk_weights is the closed form.
template <Scalar S>
WeightVector<S> tsum_rspo_maxk_weights(const SortedSample<S>& sorted, int k) {
  detail::check_maxk_args(sorted.size(), k, "tsum_rspo_maxk_weights");
  const auto n = static_cast<std::int64_t>(sorted.size());

  // Per-position inner sum for the strictly-lower (third) term.
  std::vector<S> lower_sum(sorted.size(), S(0));
  if (k >= 2) {
    for (std::size_t q = 0; q < sorted.size(); ++q) {
      // Only responses strictly below some other one are ever used here.
      if (sorted.c_lt[q] + sorted.c_eq[q] + 1 >= sorted.size()) continue;
      for (int t = 1; t <= k - 1; ++t) {
        lower_sum[q] += product_power_estimate<S>({n - 2, static_cast<std::int64_t>(sorted.c_lt[q]),
                                                   static_cast<std::int64_t>(sorted.c_eq[q]), t - 1, k - t - 1});
      }
    }
  }

  std::vector<S> w(sorted.size(), S(0));
  for (std::size_t p = 0; p < sorted.size(); ++p) {
    const S& r = sorted.sorted_rewards[p];
    const auto c_lt = static_cast<std::int64_t>(sorted.c_lt[p]);
    const auto c_eq = static_cast<std::int64_t>(sorted.c_eq[p]);

    S first(0);
    for (int t = 1; t <= k; ++t) first += product_power_estimate<S>({n - 1, c_lt, c_eq, t - 1, k - t});
    S value = r * first;

    if (k >= 2) {
      if (c_eq > 0) {
        S peers(0);
        for (int t = 1; t <= k - 1; ++t) {
          peers += S(t) * product_power_estimate<S>({n - 2, c_lt, c_eq - 1, t - 1, k - t - 1});
        }
        value -= r * S(c_eq) / S(n - 1) * peers;
      }
      S lower(0);
      for (std::size_t q = 0; q < sorted.c_lt[p]; ++q) lower += sorted.sorted_rewards[q] * lower_sum[q];
      value -= S(k) / S(n - 1) * lower;
    }
    w[p] = value;
  }

  WeightVector<S> out;
  out.estimator_tag = "rspo_maxk_tsum";
  out.weights = sorted.unsort(w);
  return out;
}

template <Scalar S>
WeightVector<S> tsum_rspo_maxk_weights(const RewardSample<S>& sample, int k) {
  return tsum_rspo_maxk_weights(sort_sample(sample), k);
}

/// Plug-in Max@k weights k [R_i P^_<=(i)^{k-1} - (k-1) g^(i)] from empirical
/// frequencies. Biased; no sign guarantee.
template <Scalar S>
WeightVector<S> plugin_maxk_weights(const RewardSample<S>& sample, int k) {
  if (k < 1) throw std::invalid_argument("plugin_maxk_weights: k must be >= 1");
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("plugin_maxk_weights: empty sample");

  WeightVector<S> out;
  out.estimator_tag = "plugin_maxk";
  if (k == 1) {
    out.weights = sample.rewards;
    return out;
  }
  const S inv_n = S(1) / S(static_cast<long long>(n));
  std::vector<S> cdf_le(n, S(0));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) count += sample.rewards[j] <= sample.rewards[i] ? 1 : 0;
    cdf_le[i] = S(static_cast<long long>(count)) * inv_n;
  }
  out.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    S g(0);
    for (std::size_t j = 0; j < n; ++j) {
      if (sample.rewards[j] < sample.rewards[i]) g += sample.rewards[j] * ipow(cdf_le[j], k - 2);
    }
    g *= inv_n;
    out.weights[i] = S(k) * (sample.rewards[i] * ipow(cdf_le[i], k - 1) - S(k - 1) * g);
  }
  return out;
}

/// Total third-term contribution of one equal-reward group of size
/// c_eq_group + 1 sitting above c_lt responses, to the weight of a
/// strictly higher response:
///   -(1/C(n-2, k-2)) k(k-1)/(n-1) [C(c_<, k-2) + ... + C(c_< + c_=, k-2)] R.
template <Scalar S = double>
S group_contribution(std::int64_t c_lt, std::int64_t c_eq_group, std::int64_t n, int k, const S& reward) {
  if (k < 2) throw std::invalid_argument("group_contribution: k must be >= 2");
  if (n < k) throw std::invalid_argument("group_contribution: need n >= k");
  if (c_lt < 0 || c_eq_group < 0 || c_lt + c_eq_group > n - 2) {
    throw std::invalid_argument("group_contribution: counts out of range");
  }
  S sum(0);
  for (std::int64_t j = c_lt; j <= c_lt + c_eq_group; ++j) {
    sum += binom_ratio_product<S>(n - 1, n - 1 - j, k - 1);  // C(j, k-2)/C(n-2, k-2)
  }
  return -(S(k) * S(k - 1) / S(n - 1)) * sum * reward;
}

}  // namespace rspo
