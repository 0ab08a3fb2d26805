#pragma once

#include "rspo/types.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rspo {

inline std::vector<std::string> builtin_task_names() { return {"two_mode_maxk", "split_passk", "entropy_probe"}; }

/// Reference tasks.
///
///  two_mode_maxk  shared policy over {A, B, C}; x1 rewards (0.6, 1, 0),
///                 x2 rewards (0.6, 0, 1). Max@1 prefers all mass on A;
///                 Max@4 prefers splitting between B and C.
///  split_passk    shared policy over {A, B, C}; x1 accepts only B, x2 only C.
///  entropy_probe  one prompt, eight responses, the first four correct.
inline TaskSpec builtin_task(std::string_view name) {
  TaskSpec t;
  t.name = std::string(name);
  t.n = 16;
  t.eval_k_list = {1, 2, 4, 8};
  if (name == "two_mode_maxk") {
    t.vocab_size = 3;
    t.policy_mode = PolicyMode::shared;
    t.prompts = {{"x1", {0.6, 1.0, 0.0}, RewardKind::continuous}, {"x2", {0.6, 0.0, 1.0}, RewardKind::continuous}};
  } else if (name == "split_passk") {
    t.vocab_size = 3;
    t.policy_mode = PolicyMode::shared;
    t.prompts = {{"x1", {0.0, 1.0, 0.0}, RewardKind::binary}, {"x2", {0.0, 0.0, 1.0}, RewardKind::binary}};
  } else if (name == "entropy_probe") {
    t.vocab_size = 8;
    t.policy_mode = PolicyMode::per_prompt;
    t.prompts = {{"x1", {1, 1, 1, 1, 0, 0, 0, 0}, RewardKind::binary}};
  } else {
    throw std::invalid_argument("unknown built-in task '" + std::string(name) + "'");
  }
  return t;
}

}  // namespace rspo
