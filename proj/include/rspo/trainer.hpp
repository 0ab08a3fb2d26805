#pragma once

#include "rspo/analytic.hpp"
#include "rspo/estimator.hpp"
#include "rspo/gradient.hpp"
#include "rspo/random.hpp"
#include "rspo/types.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rspo {

struct TrainConfig {
  TaskSpec task;
  Estimator estimator = Estimator::policy_gradient;
  int k = 1;
  int n = 16;
  int steps = 100;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  bool prune_zero_weights = true;
  int log_every = 10;

  void validate() const {
    task.validate();
    if (steps < 1) throw std::invalid_argument("train config: steps must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw std::invalid_argument("train config: learning_rate must be positive and finite");
    }
    if (log_every < 1) throw std::invalid_argument("train config: log_every must be >= 1");
    validate_estimator_setup(estimator, n, k, task.all_binary());
  }
};

/// Exact metrics of the current policy. pass_at_k and max_at_k are aligned
/// with the task's eval_k_list; pass_at_k is empty unless every table is binary.
struct RunRecord {
  int step = 0;
  double entropy = 0.0;  // nats, mean over prompts
  double mean_weight = 0.0;
  double pruned_fraction = 0.0;
  std::vector<double> pass_at_k;
  std::vector<double> max_at_k;

  bool operator==(const RunRecord&) const = default;
};

struct TrainResult {
  std::vector<DiscretePolicy> policies;  // one per prompt, or one shared
  std::vector<RunRecord> records;
};

/// n i.i.d. draws from `policy` with rewards looked up in `table`.
inline RewardSample<double> sample_group(const DiscretePolicy& policy, const RewardTable& table, int n, Engine& eng) {
  if (n < 1) throw std::invalid_argument("sample_group: n must be >= 1");
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int& y : ids) y = sample_categorical(eng, policy.probabilities());
  return make_sample<double>(table.rewards, ids, table.prompt_id);
}

struct PrunedGroup {
  RewardSample<double> sample;
  WeightVector<double> weights;
  double pruned_fraction = 0.0;
  std::size_t original_n = 0;  // divisor for gradient_contribution
};

/// Drops responses whose weight is exactly zero.
inline PrunedGroup apply_pruning(const RewardSample<double>& sample, const WeightVector<double>& weights) {
  if (weights.size() != sample.size() || sample.response_ids.size() != sample.size()) {
    throw std::invalid_argument("apply_pruning: weights are not aligned with the sample");
  }
  PrunedGroup out;
  out.original_n = sample.size();
  out.sample.prompt_id = sample.prompt_id;
  out.weights.estimator_tag = weights.estimator_tag;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (weights.weights[i] == 0.0) continue;
    out.sample.response_ids.push_back(sample.response_ids[i]);
    out.sample.rewards.push_back(sample.rewards[i]);
    out.weights.weights.push_back(weights.weights[i]);
  }
  out.pruned_fraction =
      sample.size() == 0 ? 0.0
                         : static_cast<double>(sample.size() - out.sample.size()) / static_cast<double>(sample.size());
  return out;
}

inline RunRecord evaluate_policies(const TaskSpec& task, const std::vector<DiscretePolicy>& policies, int step) {
  RunRecord rec;
  rec.step = step;
  const auto prompts = static_cast<double>(task.prompts.size());
  const bool binary = task.all_binary();
  rec.max_at_k.assign(task.eval_k_list.size(), 0.0);
  if (binary) rec.pass_at_k.assign(task.eval_k_list.size(), 0.0);
  for (std::size_t i = 0; i < task.prompts.size(); ++i) {
    const DiscretePolicy& pol = policies[task.policy_index(i)];
    const RewardTable& table = task.prompts[i];
    rec.entropy += entropy(pol) / prompts;
    for (std::size_t e = 0; e < task.eval_k_list.size(); ++e) {
      const int k = task.eval_k_list[e];
      rec.max_at_k[e] += max_at_k_exact(pol, table, k) / prompts;
      if (binary) rec.pass_at_k[e] += pass_at_k_exact(pol, table, k) / prompts;
    }
  }
  return rec;
}

/// REINFORCE-style ascent: per step, every prompt draws n responses from its
/// own RNG stream, the estimator turns rewards into weights, and the logits
/// move by learning_rate times the prompt-averaged gradient_contribution.
/// Records are taken at step 0, every log_every steps, and at the last step.
inline TrainResult train(const TrainConfig& config) {
  config.validate();
  const TaskSpec& task = config.task;
  const std::size_t vocab = task.vocab_size;
  const std::size_t num_prompts = task.prompts.size();

  TrainResult result;
  result.policies.assign(task.num_policies(), DiscretePolicy::uniform(vocab));

  std::vector<Engine> streams;
  streams.reserve(num_prompts);
  for (std::size_t i = 0; i < num_prompts; ++i) streams.push_back(make_stream(config.seed, i));

  result.records.push_back(evaluate_policies(task, result.policies, 0));

  for (int step = 1; step <= config.steps; ++step) {
    std::vector<std::vector<double>> grads(result.policies.size(), std::vector<double>(vocab, 0.0));
    double weight_sum = 0.0;
    std::size_t pruned = 0;
    std::size_t drawn = 0;

    for (std::size_t i = 0; i < num_prompts; ++i) {
      const std::size_t pi = task.policy_index(i);
      const DiscretePolicy& pol = result.policies[pi];
      const auto sample = sample_group(pol, task.prompts[i], config.n, streams[i]);
      const auto weights = compute_weights(config.estimator, sample, config.k, TieHandling::by_sample_order);
      for (double w : weights.weights) weight_sum += w;
      drawn += sample.size();

      std::vector<double> g;
      if (config.prune_zero_weights) {
        const auto kept = apply_pruning(sample, weights);
        pruned += sample.size() - kept.sample.size();
        g = gradient_contribution<double>(kept.sample, kept.weights, pol.probabilities(), kept.original_n);
      } else {
        g = gradient_contribution<double>(sample, weights, pol.probabilities());
      }
      for (std::size_t j = 0; j < vocab; ++j) grads[pi][j] += g[j] / static_cast<double>(num_prompts);
    }

    for (std::size_t p = 0; p < result.policies.size(); ++p) {
      result.policies[p].ascend(grads[p], config.learning_rate);
    }

    if (step % config.log_every == 0 || step == config.steps) {
      RunRecord rec = evaluate_policies(task, result.policies, step);
      rec.mean_weight = weight_sum / static_cast<double>(drawn);
      rec.pruned_fraction = static_cast<double>(pruned) / static_cast<double>(drawn);
      result.records.push_back(std::move(rec));
    }
  }
  return result;
}

}  // namespace rspo
