#pragma once

#include "rspo/combinatorics.hpp"
#include "rspo/gradient.hpp"
#include "rspo/types.hpp"

#include <span>
#include <stdexcept>
#include <string>

namespace rspo {

// Weight convention shared by all estimators: the factor k is folded into
// the weight; the 1/n group average is applied by gradient_contribution and
// the 1/|batch| prompt average by the trainer.

namespace detail {

template <Scalar S>
void require_binary(const RewardSample<S>& sample, const char* who) {
  if (!all_binary<S>(sample.rewards)) {
    throw std::invalid_argument(std::string(who) + ": rewards must be binary (0 or 1)");
  }
}

template <Scalar S>
std::int64_t count_correct(const RewardSample<S>& sample) {
  std::int64_t c = 0;
  for (const S& r : sample.rewards) c += (r == S(1)) ? 1 : 0;
  return c;
}

}  // namespace detail

/// Unbiased Pass@k weights: k * C(n-c, k-1)/C(n-1, k-1) on correct
/// responses, zero on incorrect ones. All weights vanish when n - c < k - 1.
template <Scalar S>
WeightVector<S> rspo_passk_weights(const RewardSample<S>& sample, int k) {
  const auto n = static_cast<std::int64_t>(sample.size());
  if (k < 1) throw std::invalid_argument("rspo_passk_weights: k must be >= 1");
  if (n < k) {
    throw std::invalid_argument("rspo_passk_weights: need n >= k (n=" + std::to_string(n) +
                                ", k=" + std::to_string(k) + ")");
  }
  detail::require_binary(sample, "rspo_passk_weights");
  const std::int64_t c = detail::count_correct(sample);
  const S scale = S(k) * binom_ratio_product<S>(n, c, k);

  WeightVector<S> out;
  out.estimator_tag = "rspo_passk";
  out.weights.reserve(sample.size());
  for (const S& r : sample.rewards) out.weights.push_back(r == S(1) ? scale : S(0));
  return out;
}

/// Plug-in Pass@k weights k (1 - c/n)^{k-1} R_i. Biased.
template <Scalar S>
WeightVector<S> naive_passk_weights(const RewardSample<S>& sample, int k) {
  const auto n = static_cast<std::int64_t>(sample.size());
  if (k < 1) throw std::invalid_argument("naive_passk_weights: k must be >= 1");
  if (n < 1) throw std::invalid_argument("naive_passk_weights: empty sample");
  detail::require_binary(sample, "naive_passk_weights");
  const std::int64_t c = detail::count_correct(sample);
  const S scale = S(k) * ipow(S(S(n - c) / S(n)), k - 1);

  WeightVector<S> out;
  out.estimator_tag = "naive_passk";
  out.weights.reserve(sample.size());
  for (const S& r : sample.rewards) out.weights.push_back(r == S(1) ? scale : S(0));
  return out;
}

/// True when every RSPO weight of the group is zero: no correct response,
/// or n - c < k - 1.
template <Scalar S>
bool passk_group_prunable(const RewardSample<S>& sample, int k) {
  const auto n = static_cast<std::int64_t>(sample.size());
  const std::int64_t c = detail::count_correct(sample);
  return c == 0 || n - c < k - 1;
}

template <Scalar S>
std::vector<S> passk_gradient_contribution(const RewardSample<S>& sample, const WeightVector<S>& weights,
                                           std::span<const S> probs) {
  return gradient_contribution(sample, weights, probs);
}

inline std::vector<double> passk_gradient_contribution(const RewardSample<double>& sample,
                                                       const WeightVector<double>& weights,
                                                       const DiscretePolicy& policy) {
  return gradient_contribution<double>(sample, weights, policy.probabilities());
}

}  // namespace rspo
