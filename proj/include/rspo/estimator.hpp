#pragma once

#include "rspo/baseline.hpp"
#include "rspo/maxk.hpp"
#include "rspo/passk.hpp"
#include "rspo/types.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rspo {

enum class Estimator {
  policy_gradient,
  baseline,
  rspo_passk,
  naive_passk,
  rspo_maxk_approx,
  rspo_maxk_exact,
  rspo_maxk_tsum,
  plugin_maxk,
};

struct EstimatorInfo {
  Estimator id;
  std::string_view name;
  bool needs_n_ge_k;
  bool needs_binary;
  bool needs_k_divides_n;
  bool unbiased;
};

inline constexpr std::array<EstimatorInfo, 8> kEstimators{{
    {Estimator::policy_gradient, "policy_gradient", false, false, false, true},
    {Estimator::baseline, "baseline", false, false, true, false},
    {Estimator::rspo_passk, "rspo_passk", true, true, false, true},
    {Estimator::naive_passk, "naive_passk", false, true, false, false},
    {Estimator::rspo_maxk_approx, "rspo_maxk_approx", true, false, false, false},
    {Estimator::rspo_maxk_exact, "rspo_maxk_exact", true, false, false, true},
    {Estimator::rspo_maxk_tsum, "rspo_maxk_tsum", true, false, false, true},
    {Estimator::plugin_maxk, "plugin_maxk", false, false, false, false},
}};

inline const EstimatorInfo& info(Estimator e) {
  for (const auto& i : kEstimators) {
    if (i.id == e) return i;
  }
  throw std::logic_error("unknown estimator");
}

inline std::string_view to_string(Estimator e) { return info(e).name; }

inline std::optional<Estimator> parse_estimator(std::string_view name) {
  for (const auto& i : kEstimators) {
    if (i.name == name) return i.id;
  }
  return std::nullopt;
}

/// Throws if `e` cannot run with group size n and parameter k.
inline void validate_estimator_setup(Estimator e, int n, int k, bool binary_rewards) {
  const auto& i = info(e);
  const std::string who(i.name);
  if (k < 1) throw std::invalid_argument(who + ": k must be >= 1");
  if (n < 1) throw std::invalid_argument(who + ": n must be >= 1");
  if (i.needs_n_ge_k && n < k) {
    throw std::invalid_argument(who + ": need n >= k (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
  }
  if (i.needs_k_divides_n && n % k != 0) {
    throw std::invalid_argument(who + ": k=" + std::to_string(k) + " must divide n=" + std::to_string(n));
  }
  if (i.needs_binary && !binary_rewards) throw std::invalid_argument(who + ": requires binary rewards");
}

/// Weights of estimator `e` for one group. policy_gradient ignores k.
template <Scalar S>
WeightVector<S> compute_weights(Estimator e, const RewardSample<S>& sample, int k,
                                TieHandling approx_ties = TieHandling::reject) {
  switch (e) {
    case Estimator::policy_gradient: {
      WeightVector<S> w;
      w.estimator_tag = "policy_gradient";
      w.weights = sample.rewards;
      return w;
    }
    case Estimator::baseline:
      return baseline_weights(sample, k);
    case Estimator::rspo_passk:
      return rspo_passk_weights(sample, k);
    case Estimator::naive_passk:
      return naive_passk_weights(sample, k);
    case Estimator::rspo_maxk_approx:
      return approx_rspo_maxk_weights(sample, k, approx_ties);
    case Estimator::rspo_maxk_exact:
      return exact_rspo_maxk_weights(sample, k);
    case Estimator::rspo_maxk_tsum:
      return tsum_rspo_maxk_weights(sample, k);
    case Estimator::plugin_maxk:
      return plugin_maxk_weights(sample, k);
  }
  throw std::logic_error("unknown estimator");
}

}  // namespace rspo
