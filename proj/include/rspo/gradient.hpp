#pragma once

#include "rspo/types.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rspo {

/// (1/n) * sum_i w_i * (e(y_i) - pi): the per-logit ascent direction of one
/// prompt's weighted log-likelihood under a softmax policy.
///
/// `divisor` is n; pass the original group size when the sample has been
/// pruned so that pruned and unpruned groups give the same result.
template <Scalar S>
std::vector<S> gradient_contribution(const RewardSample<S>& sample, const WeightVector<S>& weights,
                                     std::span<const S> probs, std::size_t divisor = 0) {
  if (weights.size() != sample.size() || sample.response_ids.size() != sample.size()) {
    throw std::invalid_argument("gradient_contribution: weights are not aligned with the sample");
  }
  if (divisor == 0) divisor = sample.size();
  std::vector<S> grad(probs.size(), S(0));
  if (divisor == 0) return grad;

  S total(0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const int y = sample.response_ids[i];
    if (y < 0 || static_cast<std::size_t>(y) >= probs.size()) {
      throw std::invalid_argument("gradient_contribution: response id out of range");
    }
    grad[static_cast<std::size_t>(y)] += weights.weights[i];
    total += weights.weights[i];
  }
  const S inv_n = S(1) / S(static_cast<long long>(divisor));
  for (std::size_t j = 0; j < probs.size(); ++j) {
    grad[j] = (grad[j] - probs[j] * total) * inv_n;
  }
  return grad;
}

}  // namespace rspo
