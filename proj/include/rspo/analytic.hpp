#pragma once

// Closed-form ground truths for softmax policies over a finite response set:
// best-of-k probabilities, exact Pass@k / Max@k objectives and their logit
// gradients, entropy, and the sample-based evaluation metrics.
//
// Every routine takes the policy as a probability vector so that it can run
// on exact rationals as well as doubles. DiscretePolicy overloads are at the
// bottom.

#include "rspo/combinatorics.hpp"
#include "rspo/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rspo {

namespace detail {

template <Scalar S>
void check_policy_table(std::span<const S> probs, std::span<const S> rewards) {
  if (probs.size() != rewards.size()) {
    throw std::invalid_argument("policy and reward table differ in size (" + std::to_string(probs.size()) +
                                " vs " + std::to_string(rewards.size()) + ")");
  }
}

inline void check_k(int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1 (got " + std::to_string(k) + ")");
}

/// Distinct reward levels in ascending order with F(r) = P(R <= r).
template <Scalar S>
struct RewardLevels {
  std::vector<S> value;
  std::vector<S> cdf;      // F(r)
  std::vector<S> cdf_lt;   // F(r-)
};

template <Scalar S>
RewardLevels<S> reward_levels(std::span<const S> probs, std::span<const S> rewards) {
  std::vector<std::size_t> idx(rewards.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rewards[a] < rewards[b]; });
  RewardLevels<S> lv;
  S running(0);
  for (std::size_t p = 0; p < idx.size();) {
    const S level = rewards[idx[p]];
    const S below = running;
    while (p < idx.size() && rewards[idx[p]] == level) running += probs[idx[p++]];
    lv.value.push_back(level);
    lv.cdf_lt.push_back(below);
    lv.cdf.push_back(running);
  }
  return lv;
}

}  // namespace detail

/// P_< and P_<= at a reward level.
template <Scalar S = double>
struct CdfPoint {
  S value{};
  S p_lt{};
  S p_le{};
};

template <Scalar S>
CdfPoint<S> cdf_at(std::span<const S> probs, std::span<const S> rewards, std::size_t y) {
  detail::check_policy_table(probs, rewards);
  if (y >= rewards.size()) throw std::invalid_argument("response index out of range");
  CdfPoint<S> pt;
  pt.value = rewards[y];
  pt.p_lt = S(0);
  pt.p_le = S(0);
  for (std::size_t j = 0; j < rewards.size(); ++j) {
    if (rewards[j] < rewards[y]) pt.p_lt += probs[j];
    if (rewards[j] <= rewards[y]) pt.p_le += probs[j];
  }
  return pt;
}

/// Probability that y is among k i.i.d. draws and attains their maximum
/// reward: sum_{i=1}^k P_<^{i-1} pi(y) P_<=^{k-i}.
template <Scalar S>
S best_of_k_prob(std::span<const S> probs, std::span<const S> rewards, std::size_t y, int k) {
  detail::check_k(k);
  const CdfPoint<S> pt = cdf_at(probs, rewards, y);
  const S gap = pt.p_le - pt.p_lt;
  bool closed_form;
  if constexpr (std::is_same_v<S, Rational>) {
    closed_form = gap > S(0);
  } else {
    closed_form = gap > 1e-6;
  }
  if (closed_form) {
    // Geometric sum: (P_<=^k - P_<^k) / (P_<= - P_<).
    return probs[y] * (ipow(pt.p_le, k) - ipow(pt.p_lt, k)) / gap;
  }
  S sum(0);
  for (int i = 1; i <= k; ++i) sum += ipow(pt.p_lt, i - 1) * ipow(pt.p_le, k - i);
  return probs[y] * sum;
}

/// Pass@k = 1 - (1 - w)^k.
template <Scalar S>
S pass_at_k_exact(const S& w, int k) {
  detail::check_k(k);
  if (w < S(0) || w > S(1)) throw std::invalid_argument("pass_at_k_exact: w must lie in [0, 1]");
  return S(1) - ipow(S(S(1) - w), k);
}

/// w = total probability of reward-1 responses.
template <Scalar S>
S win_mass(std::span<const S> probs, std::span<const S> rewards) {
  detail::check_policy_table(probs, rewards);
  S w(0);
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (rewards[j] == S(1)) w += probs[j];
  }
  return w;
}

/// Max@k = sum over distinct reward levels r of r * (F(r)^k - F(r-)^k).
template <Scalar S>
S max_at_k_exact(std::span<const S> probs, std::span<const S> rewards, int k) {
  detail::check_k(k);
  detail::check_policy_table(probs, rewards);
  const auto lv = detail::reward_levels(probs, rewards);
  S total(0);
  for (std::size_t l = 0; l < lv.value.size(); ++l) {
    total += lv.value[l] * (ipow(lv.cdf[l], k) - ipow(lv.cdf_lt[l], k));
  }
  return total;
}

/// Max@k via the single-response form E_y[R(y) sum_i P_<^{i-1} P_<=^{k-i}].
/// Agrees with max_at_k_exact with or without ties.
template <Scalar S>
S max_at_k_via_best_of_k(std::span<const S> probs, std::span<const S> rewards, int k) {
  detail::check_k(k);
  detail::check_policy_table(probs, rewards);
  S total(0);
  for (std::size_t y = 0; y < probs.size(); ++y) {
    const CdfPoint<S> pt = cdf_at(probs, rewards, y);
    S sum(0);
    for (int i = 1; i <= k; ++i) sum += ipow(pt.p_lt, i - 1) * ipow(pt.p_le, k - i);
    total += rewards[y] * probs[y] * sum;
  }
  return total;
}

/// Probability that the maximum of k draws equals each distinct reward level;
/// sums to one.
template <Scalar S>
std::vector<S> max_level_distribution(std::span<const S> probs, std::span<const S> rewards, int k) {
  detail::check_k(k);
  detail::check_policy_table(probs, rewards);
  const auto lv = detail::reward_levels(probs, rewards);
  std::vector<S> out;
  out.reserve(lv.value.size());
  for (std::size_t l = 0; l < lv.value.size(); ++l) out.push_back(ipow(lv.cdf[l], k) - ipow(lv.cdf_lt[l], k));
  return out;
}

/// Pass@k gradient weight k (1 - w)^{k-1}.
template <Scalar S>
S pass_weight_exact(const S& w, int k) {
  detail::check_k(k);
  if (w < S(0) || w > S(1)) throw std::invalid_argument("pass_weight_exact: w must lie in [0, 1]");
  return S(k) * ipow(S(S(1) - w), k - 1);
}

/// d Pass@k / d logit_j = k (1 - w)^{k-1} pi_j (1[R_j = 1] - w).
template <Scalar S>
std::vector<S> exact_passk_gradient(std::span<const S> probs, std::span<const S> rewards, int k) {
  detail::check_k(k);
  detail::check_policy_table(probs, rewards);
  if (!all_binary(rewards)) throw std::invalid_argument("exact_passk_gradient: reward table must be binary");
  const S w = win_mass(probs, rewards);
  const S scale = pass_weight_exact(w, k);
  std::vector<S> grad(probs.size());
  for (std::size_t j = 0; j < probs.size(); ++j) {
    grad[j] = scale * probs[j] * ((rewards[j] == S(1) ? S(1) : S(0)) - w);
  }
  return grad;
}

/// Gradient of max_at_k_exact with respect to the logits. Uses
/// dF(r)/dz_j = pi_j (1[R_j <= r] - F(r)).
template <Scalar S>
std::vector<S> exact_maxk_gradient(std::span<const S> probs, std::span<const S> rewards, int k) {
  detail::check_k(k);
  detail::check_policy_table(probs, rewards);
  const auto lv = detail::reward_levels(probs, rewards);
  std::vector<S> grad(probs.size(), S(0));
  for (std::size_t l = 0; l < lv.value.size(); ++l) {
    const S& r = lv.value[l];
    const S hi = S(k) * ipow(lv.cdf[l], k - 1);
    const S lo = S(k) * ipow(lv.cdf_lt[l], k - 1);
    for (std::size_t j = 0; j < probs.size(); ++j) {
      const S d_hi = probs[j] * ((rewards[j] <= r ? S(1) : S(0)) - lv.cdf[l]);
      const S d_lo = probs[j] * ((rewards[j] < r ? S(1) : S(0)) - lv.cdf_lt[l]);
      grad[j] += r * (hi * d_hi - lo * d_lo);
    }
  }
  return grad;
}

/// Shannon entropy in nats.
inline double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

/// Unbiased Pass@k estimate from n draws with c successes: 1 - C(n-c,k)/C(n,k).
inline double pass_at_k_metric(std::int64_t n, std::int64_t c, std::int64_t k) {
  if (k < 1 || k > n) throw std::invalid_argument("pass_at_k_metric: need 1 <= k <= n");
  if (c < 0 || c > n) throw std::invalid_argument("pass_at_k_metric: need 0 <= c <= n");
  if (n - c < k) return 1.0;
  // C(n-c,k)/C(n,k) = prod_{i=0}^{k-1} (n-c-i)/(n-i)
  double ratio = 1.0;
  for (std::int64_t i = 0; i < k; ++i) ratio *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  return 1.0 - ratio;
}

/// Average of the maximum over all size-k subsets of `rewards`:
/// sum over levels r of r * [C(c_<=, k) - C(c_<, k)] / C(n, k).
template <Scalar S>
S max_at_k_sample_metric(std::span<const S> rewards, int k) {
  const auto n = static_cast<std::int64_t>(rewards.size());
  if (k < 1 || k > n) throw std::invalid_argument("max_at_k_sample_metric: need 1 <= k <= n");
  const auto sorted = sort_sample(sample_from_rewards<S>(std::vector<S>(rewards.begin(), rewards.end())));
  const S denom = binom_as<S>(n, k);
  S total(0);
  for (std::size_t p = 0; p < sorted.size(); p += sorted.c_eq[p] + 1) {
    const auto lt = static_cast<std::int64_t>(sorted.c_lt[p]);
    const auto le = lt + static_cast<std::int64_t>(sorted.c_eq[p]) + 1;
    total += sorted.sorted_rewards[p] * (binom_as<S>(le, k) - binom_as<S>(lt, k));
  }
  return total / denom;
}

// DiscretePolicy / RewardTable conveniences (double path).

inline double best_of_k_prob(const DiscretePolicy& policy, const RewardTable& table, std::size_t y, int k) {
  return best_of_k_prob<double>(policy.probabilities(), table.rewards, y, k);
}
inline double max_at_k_exact(const DiscretePolicy& policy, const RewardTable& table, int k) {
  return max_at_k_exact<double>(policy.probabilities(), table.rewards, k);
}
inline double pass_at_k_exact(const DiscretePolicy& policy, const RewardTable& table, int k) {
  return pass_at_k_exact<double>(win_mass<double>(policy.probabilities(), table.rewards), k);
}
inline std::vector<double> exact_passk_gradient(const DiscretePolicy& policy, const RewardTable& table, int k) {
  return exact_passk_gradient<double>(policy.probabilities(), table.rewards, k);
}
inline std::vector<double> exact_maxk_gradient(const DiscretePolicy& policy, const RewardTable& table, int k) {
  return exact_maxk_gradient<double>(policy.probabilities(), table.rewards, k);
}
inline double entropy(const DiscretePolicy& policy) { return entropy(policy.probabilities()); }

}  // namespace rspo
