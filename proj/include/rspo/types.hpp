#pragma once

#include "rspo/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rspo {

enum class RewardKind { binary, continuous };
enum class PolicyMode { per_prompt, shared };

inline const char* to_string(RewardKind kind) {
  return kind == RewardKind::binary ? "binary" : "continuous";
}
inline const char* to_string(PolicyMode mode) {
  return mode == PolicyMode::shared ? "shared" : "per_prompt";
}

template <Scalar S>
inline bool is_binary_value(const S& r) {
  return r == S(0) || r == S(1);
}

template <Scalar S>
inline bool all_binary(std::span<const S> rewards) {
  return std::all_of(rewards.begin(), rewards.end(), [](const S& r) { return is_binary_value(r); });
}

/// R(x, .) for one prompt, indexed by response id.
struct RewardTable {
  std::string prompt_id;
  std::vector<double> rewards;
  RewardKind kind = RewardKind::continuous;

  std::size_t size() const { return rewards.size(); }
  bool is_binary() const { return all_binary<double>(rewards); }

  void validate() const {
    if (rewards.empty()) throw std::invalid_argument("reward table '" + prompt_id + "' is empty");
    for (double r : rewards) {
      if (!std::isfinite(r)) {
        throw std::invalid_argument("reward table '" + prompt_id + "' has a non-finite entry");
      }
    }
    if (kind == RewardKind::binary && !is_binary()) {
      throw std::invalid_argument("reward table '" + prompt_id + "' is declared binary but has entries outside {0,1}");
    }
  }
};

/// The synthetic world: prompts, response vocabulary and evaluation settings.
struct TaskSpec {
  std::string name;
  std::size_t vocab_size = 0;
  std::vector<RewardTable> prompts;
  PolicyMode policy_mode = PolicyMode::per_prompt;
  std::vector<int> eval_k_list;
  int n = 1;

  bool all_binary() const {
    return std::all_of(prompts.begin(), prompts.end(), [](const RewardTable& t) { return t.is_binary(); });
  }

  std::size_t num_policies() const { return policy_mode == PolicyMode::shared ? 1 : prompts.size(); }
  std::size_t policy_index(std::size_t prompt) const { return policy_mode == PolicyMode::shared ? 0 : prompt; }

  int max_eval_k() const {
    return eval_k_list.empty() ? 1 : *std::max_element(eval_k_list.begin(), eval_k_list.end());
  }

  void validate() const {
    if (vocab_size == 0) throw std::invalid_argument("task '" + name + "': vocab_size must be positive");
    if (prompts.empty()) throw std::invalid_argument("task '" + name + "': no prompts");
    if (n < 1) throw std::invalid_argument("task '" + name + "': n must be positive");
    for (const auto& t : prompts) {
      t.validate();
      if (t.size() != vocab_size) {
        throw std::invalid_argument("task '" + name + "': reward table '" + t.prompt_id + "' has " +
                                    std::to_string(t.size()) + " entries, expected " + std::to_string(vocab_size));
      }
    }
    for (int k : eval_k_list) {
      if (k < 1) throw std::invalid_argument("task '" + name + "': eval k must be positive");
    }
  }
};

/// Softmax of `logits`, computed with the max subtracted.
inline std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> probs(logits.size());
  if (logits.empty()) return probs;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - top);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

/// Softmax-parameterized distribution over a finite response vocabulary.
class DiscretePolicy {
 public:
  DiscretePolicy() = default;

  explicit DiscretePolicy(std::vector<double> logits) : logits_(std::move(logits)) {
    for (double z : logits_) {
      if (!std::isfinite(z)) throw std::invalid_argument("DiscretePolicy: logits must be finite");
    }
    probs_ = softmax(logits_);
  }

  static DiscretePolicy uniform(std::size_t vocab_size) {
    return DiscretePolicy(std::vector<double>(vocab_size, 0.0));
  }

  /// Logits log(p); every p must be strictly positive.
  static DiscretePolicy from_probabilities(std::span<const double> probs) {
    std::vector<double> logits;
    logits.reserve(probs.size());
    for (double p : probs) {
      if (!(p > 0.0)) throw std::invalid_argument("DiscretePolicy: probabilities must be positive");
      logits.push_back(std::log(p));
    }
    return DiscretePolicy(std::move(logits));
  }

  std::size_t size() const { return logits_.size(); }
  const std::vector<double>& logits() const { return logits_; }
  const std::vector<double>& probabilities() const { return probs_; }
  double prob(std::size_t y) const { return probs_.at(y); }

  /// logits += step * direction.
  void ascend(std::span<const double> direction, double step) {
    if (direction.size() != logits_.size()) {
      throw std::invalid_argument("DiscretePolicy::ascend: direction has wrong length");
    }
    for (std::size_t i = 0; i < logits_.size(); ++i) logits_[i] += step * direction[i];
    probs_ = softmax(logits_);
  }

 private:
  std::vector<double> logits_;
  std::vector<double> probs_;
};

/// One prompt's group of n sampled responses and their rewards.
template <Scalar S = double>
struct RewardSample {
  std::string prompt_id;
  std::vector<int> response_ids;
  std::vector<S> rewards;

  std::size_t size() const { return rewards.size(); }

  void validate() const {
    if (response_ids.size() != rewards.size()) {
      throw std::invalid_argument("RewardSample: response_ids and rewards differ in length");
    }
    for (const S& r : rewards) {
      if (!is_finite(r)) throw std::invalid_argument("RewardSample: non-finite reward");
    }
  }
};

/// Builds a sample with rewards looked up from `rewards` (a reward table row).
template <Scalar S = double>
inline RewardSample<S> make_sample(std::span<const S> rewards, std::span<const int> response_ids,
                                   std::string prompt_id = {}) {
  RewardSample<S> s;
  s.prompt_id = std::move(prompt_id);
  s.response_ids.assign(response_ids.begin(), response_ids.end());
  s.rewards.reserve(response_ids.size());
  for (int y : response_ids) {
    if (y < 0 || static_cast<std::size_t>(y) >= rewards.size()) {
      throw std::invalid_argument("make_sample: response id out of range");
    }
    s.rewards.push_back(rewards[static_cast<std::size_t>(y)]);
  }
  return s;
}

/// A sample with no response ids, for estimators that only need rewards.
template <Scalar S = double>
inline RewardSample<S> sample_from_rewards(std::vector<S> rewards) {
  RewardSample<S> s;
  s.response_ids.resize(rewards.size());
  std::iota(s.response_ids.begin(), s.response_ids.end(), 0);
  s.rewards = std::move(rewards);
  return s;
}

/// Per-response gradient weights aligned with a RewardSample.
template <Scalar S = double>
struct WeightVector {
  std::vector<S> weights;
  std::string estimator_tag;

  std::size_t size() const { return weights.size(); }
};

/// Stable ascending order of a sample's rewards with tie counts.
/// All per-position vectors are indexed by sorted position.
template <Scalar S = double>
struct SortedSample {
  std::vector<std::size_t> order;  // order[p] = index into the original sample
  std::vector<S> sorted_rewards;
  std::vector<std::size_t> c_lt;  // responses with strictly smaller reward
  std::vector<std::size_t> c_eq;  // tie-group size minus one

  std::size_t size() const { return order.size(); }

  bool has_ties() const {
    return std::any_of(c_eq.begin(), c_eq.end(), [](std::size_t c) { return c > 0; });
  }

  /// Scatter values given in sorted order back to the original sample order.
  std::vector<S> unsort(std::span<const S> by_position) const {
    std::vector<S> out(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) out[order[p]] = by_position[p];
    return out;
  }
};

template <Scalar S>
inline SortedSample<S> sort_sample(const RewardSample<S>& sample) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("sort_sample: empty sample");
  for (const S& r : sample.rewards) {
    if (!is_finite(r)) throw std::invalid_argument("sort_sample: non-finite reward");
  }

  SortedSample<S> out;
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return sample.rewards[a] < sample.rewards[b]; });

  out.sorted_rewards.reserve(n);
  for (std::size_t idx : out.order) out.sorted_rewards.push_back(sample.rewards[idx]);

  out.c_lt.assign(n, 0);
  out.c_eq.assign(n, 0);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && out.sorted_rewards[end] == out.sorted_rewards[start]) ++end;
    for (std::size_t p = start; p < end; ++p) {
      out.c_lt[p] = start;
      out.c_eq[p] = end - start - 1;
    }
    start = end;
  }
  return out;
}

}  // namespace rspo
