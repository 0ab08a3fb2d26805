#pragma once

#include "rspo/types.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rspo {

/// Splits n sampled responses into n/k disjoint groups in sampling order.
/// Each group lists indices into the sample.
template <Scalar S>
std::vector<std::vector<std::size_t>> partition_into_groups(const RewardSample<S>& sample, int k) {
  if (k < 1) throw std::invalid_argument("partition_into_groups: k must be >= 1");
  const std::size_t n = sample.size();
  const auto group = static_cast<std::size_t>(k);
  if (n == 0 || n % group != 0) {
    throw std::invalid_argument("partition_into_groups: k=" + std::to_string(k) + " does not divide n=" +
                                std::to_string(n));
  }
  std::vector<std::vector<std::size_t>> groups(n / group);
  for (std::size_t i = 0; i < n; ++i) groups[i / group].push_back(i);
  return groups;
}

/// Every member of a group gets the group's maximum reward as its weight.
template <Scalar S>
std::vector<WeightVector<S>> baseline_group_weights(const std::vector<std::vector<S>>& groups, int k) {
  if (k < 1) throw std::invalid_argument("baseline_group_weights: k must be >= 1");
  std::vector<WeightVector<S>> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.size() != static_cast<std::size_t>(k)) {
      throw std::invalid_argument("baseline_group_weights: group of size " + std::to_string(g.size()) +
                                  ", expected " + std::to_string(k));
    }
    const S top = *std::max_element(g.begin(), g.end());
    WeightVector<S> w;
    w.estimator_tag = "baseline";
    w.weights.assign(g.size(), top);
    out.push_back(std::move(w));
  }
  return out;
}

/// Baseline weights for a flat sample, aligned with it.
template <Scalar S>
WeightVector<S> baseline_weights(const RewardSample<S>& sample, int k) {
  const auto groups = partition_into_groups(sample, k);
  std::vector<std::vector<S>> rewards;
  rewards.reserve(groups.size());
  for (const auto& g : groups) {
    std::vector<S> r;
    for (std::size_t i : g) r.push_back(sample.rewards[i]);
    rewards.push_back(std::move(r));
  }
  const auto per_group = baseline_group_weights(rewards, k);
  WeightVector<S> out;
  out.estimator_tag = "baseline";
  out.weights.resize(sample.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t m = 0; m < groups[g].size(); ++m) out.weights[groups[g][m]] = per_group[g].weights[m];
  }
  return out;
}

}  // namespace rspo
