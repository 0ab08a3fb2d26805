#pragma once

// Brute-force ground truth. Nothing here calls into the estimators'
// closed forms except through the public compute_weights dispatch whose
// expectation is being measured.

#include "rspo/analytic.hpp"
#include "rspo/combinatorics.hpp"
#include "rspo/estimator.hpp"
#include "rspo/gradient.hpp"
#include "rspo/maxk.hpp"
#include "rspo/random.hpp"
#include "rspo/types.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rspo {

inline constexpr std::uint64_t kEnumerationBudget = 10'000'000;

/// sum_{a=0}^m C(c_<, a) C(c_< + c_= - a, m - a) / C(m, a), summed directly.
inline Rational lemma2_direct_sum(std::int64_t c_lt, std::int64_t c_eq, std::int64_t m) {
  Rational sum(0);
  for (std::int64_t a = 0; a <= m; ++a) {
    if (a > c_lt) break;
    sum += Rational(binom(c_lt, a) * binom(c_lt + c_eq - a, m - a)) / Rational(binom(m, a));
  }
  return sum;
}

/// sum_{a=0}^m (a+1) C(c_<, a) C(c_< + c_= - a, m - a) / C(m, a), summed directly.
inline Rational lemma3_direct_sum(std::int64_t c_lt, std::int64_t c_eq, std::int64_t m) {
  Rational sum(0);
  for (std::int64_t a = 0; a <= m; ++a) {
    if (a > c_lt) break;
    sum += Rational((a + 1) * binom(c_lt, a) * binom(c_lt + c_eq - a, m - a)) / Rational(binom(m, a));
  }
  return sum;
}

namespace detail {

inline std::uint64_t checked_power(std::uint64_t base, int exp, std::uint64_t budget) {
  std::uint64_t total = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && total > budget / base) return std::numeric_limits<std::uint64_t>::max();
    total *= base;
  }
  return total;
}

// Visits every ordered n-tuple over [0, V) as an odometer.
template <class Visit>
void for_each_tuple(std::size_t vocab, int n, Visit&& visit) {
  std::vector<int> tuple(static_cast<std::size_t>(n), 0);
  while (true) {
    visit(std::span<const int>(tuple));
    int pos = n - 1;
    while (pos >= 0 && ++tuple[static_cast<std::size_t>(pos)] == static_cast<int>(vocab)) {
      tuple[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
}

}  // namespace detail

/// Exact expectation of the assembled per-logit gradient contribution of
/// estimator `e` over all V^n ordered i.i.d. outcomes, each weighted by its
/// sampling probability prod_i pi(y_i). Approximate-Max@k ties are ranked by
/// sample order.
template <Scalar S>
std::vector<S> enumerate_estimator_expectation(std::span<const S> probs, std::span<const S> rewards, Estimator e,
                                               int n, int k, std::uint64_t budget = kEnumerationBudget) {
  if (probs.size() != rewards.size()) throw std::invalid_argument("enumerate: policy/table size mismatch");
  if (n < 1) throw std::invalid_argument("enumerate: n must be >= 1");
  const std::uint64_t outcomes = detail::checked_power(probs.size(), n, budget);
  if (outcomes > budget) {
    throw std::invalid_argument("enumerate: V^n = " + std::to_string(probs.size()) + "^" + std::to_string(n) +
                                " exceeds the enumeration budget");
  }
  validate_estimator_setup(e, n, k, all_binary(rewards));

  std::vector<S> expectation(probs.size(), S(0));
  detail::for_each_tuple(probs.size(), n, [&](std::span<const int> tuple) {
    S weight(1);
    for (int y : tuple) weight *= probs[static_cast<std::size_t>(y)];
    if (weight == S(0)) return;
    const auto sample = make_sample<S>(rewards, tuple);
    const auto w = compute_weights(e, sample, k, TieHandling::by_sample_order);
    const auto g = gradient_contribution(sample, w, probs);
    for (std::size_t j = 0; j < g.size(); ++j) expectation[j] += weight * g[j];
  });
  return expectation;
}

/// Expectation of product_power_estimate over n0 i.i.d. samples, each
/// strictly below the reference with probability p_lt, tied with
/// probability p_le - p_lt, and above otherwise.
template <Scalar S>
S enumerate_product_power_expectation(const S& p_lt, const S& p_le, std::int64_t n0, std::int64_t a,
                                      std::int64_t b) {
  if (n0 < 0 || n0 > 16) throw std::invalid_argument("enumerate_product_power_expectation: n0 out of range");
  const S p_eq = p_le - p_lt;
  const S p_gt = S(1) - p_le;
  S total(0);
  detail::for_each_tuple(3, static_cast<int>(n0), [&](std::span<const int> tuple) {
    S weight(1);
    std::int64_t lt = 0, eq = 0;
    for (int cat : tuple) {
      if (cat == 0) {
        weight *= p_lt;
        ++lt;
      } else if (cat == 1) {
        weight *= p_eq;
        ++eq;
      } else {
        weight *= p_gt;
      }
    }
    if (weight == S(0)) return;
    total += weight * product_power_estimate<S>({n0, lt, eq, a, b});
  });
  return total;
}

// --- Reference optimum of the exact objective ---------------------------------

enum class Objective { pass_at_k, max_at_k };

inline const char* to_string(Objective o) { return o == Objective::pass_at_k ? "pass_at_k" : "max_at_k"; }

struct OptimumResult {
  std::vector<std::vector<double>> probabilities;  // one distribution per policy
  double value = 0.0;
};

/// Exact objective of one prompt under probability vector p.
inline double prompt_objective(std::span<const double> p, const RewardTable& table, Objective objective, int k) {
  if (objective == Objective::pass_at_k) {
    if (!table.is_binary()) throw std::invalid_argument("pass_at_k objective requires binary reward tables");
    double w = std::clamp(win_mass<double>(p, table.rewards), 0.0, 1.0);
    return pass_at_k_exact<double>(w, k);
  }
  return max_at_k_exact<double>(p, table.rewards, k);
}

/// Mean over prompts of the exact objective; `probs` holds one vector per policy.
inline double objective_value(const TaskSpec& task, const std::vector<std::vector<double>>& probs,
                              Objective objective, int k) {
  if (probs.size() != task.num_policies()) throw std::invalid_argument("objective_value: wrong number of policies");
  double total = 0.0;
  for (std::size_t i = 0; i < task.prompts.size(); ++i) {
    total += prompt_objective(probs[task.policy_index(i)], task.prompts[i], objective, k);
  }
  return total / static_cast<double>(task.prompts.size());
}

namespace detail {

using SimplexFn = std::function<double(std::span<const double>)>;
using SimplexGrad = std::function<std::vector<double>(std::span<const double>)>;

// Pattern search over pairwise mass transfers p_j -> p_i with halving step.
inline std::vector<double> polish_on_simplex(const SimplexFn& f, std::vector<double> p) {
  double best = f(p);
  double h = 0.25;
  std::size_t evals = 0;
  const std::size_t v = p.size();
  while (h > 1e-13 && evals < 2'000'000) {
    bool improved = false;
    for (std::size_t i = 0; i < v; ++i) {
      for (std::size_t j = 0; j < v; ++j) {
        if (i == j || p[j] <= 0.0) continue;
        const double amount = std::min(h, p[j]);
        std::vector<double> q = p;
        q[i] += amount;
        q[j] = amount == p[j] ? 0.0 : q[j] - amount;
        const double val = f(q);
        ++evals;
        if (val > best) {
          best = val;
          p = std::move(q);
          improved = true;
        }
      }
    }
    if (!improved) h *= 0.5;
  }
  return p;
}

inline void simplex_grid(std::size_t v, int resolution, std::vector<int>& parts, std::size_t pos, int remaining,
                         const std::function<void(const std::vector<int>&)>& visit) {
  if (pos + 1 == v) {
    parts[pos] = remaining;
    visit(parts);
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    parts[pos] = c;
    simplex_grid(v, resolution, parts, pos + 1, remaining - c, visit);
  }
}

inline std::vector<double> maximize_on_simplex(std::size_t v, const SimplexFn& f, const SimplexGrad& logit_grad,
                                               std::uint64_t seed) {
  std::vector<std::vector<double>> starts;
  starts.emplace_back(v, 1.0 / static_cast<double>(v));
  for (std::size_t i = 0; i < v; ++i) {
    std::vector<double> vertex(v, 0.0);
    vertex[i] = 1.0;
    starts.push_back(std::move(vertex));
  }

  if (v <= 4) {
    const int resolution = v <= 2 ? 1000 : (v == 3 ? 120 : 40);
    std::vector<int> parts(v, 0);
    std::vector<double> best_point;
    double best_val = -std::numeric_limits<double>::infinity();
    simplex_grid(v, resolution, parts, 0, resolution, [&](const std::vector<int>& c) {
      std::vector<double> p(v);
      for (std::size_t i = 0; i < v; ++i) p[i] = static_cast<double>(c[i]) / resolution;
      const double val = f(p);
      if (val > best_val) {
        best_val = val;
        best_point = std::move(p);
      }
    });
    starts.push_back(std::move(best_point));
  }

  // Plain gradient ascent on logits from random restarts.
  Engine eng = make_stream(seed, 0x6f7261636c65ULL);
  constexpr int kRestarts = 12;
  constexpr int kAscentSteps = 400;
  for (int r = 0; r < kRestarts; ++r) {
    std::vector<double> logits(v);
    for (double& z : logits) z = 6.0 * uniform01(eng) - 3.0;
    for (int step = 0; step < kAscentSteps; ++step) {
      const auto p = softmax(logits);
      const auto g = logit_grad(p);
      for (std::size_t i = 0; i < v; ++i) logits[i] += 2.0 * g[i];
    }
    starts.push_back(softmax(logits));
  }

  std::vector<double> best;
  double best_val = -std::numeric_limits<double>::infinity();
  for (auto& s : starts) {
    auto p = polish_on_simplex(f, s);
    const double val = f(p);
    if (val > best_val) {
      best_val = val;
      best = std::move(p);
    }
  }
  return best;
}

}  // namespace detail

/// Best policy found for the exact objective, searching the probability
/// simplex directly (so vertex and edge optima are reachable exactly).
/// Shared mode optimizes one distribution for the prompt average; per-prompt
/// mode optimizes each prompt independently. Deterministic given `seed`.
inline OptimumResult exact_objective_optimum(const TaskSpec& task, Objective objective, int k,
                                             std::uint64_t seed = 0) {
  task.validate();
  if (k < 1) throw std::invalid_argument("exact_objective_optimum: k must be >= 1");
  if (objective == Objective::pass_at_k && !task.all_binary()) {
    throw std::invalid_argument("exact_objective_optimum: pass_at_k needs binary reward tables");
  }
  const std::size_t v = task.vocab_size;

  auto grad_for = [&](const RewardTable& t, std::span<const double> p) {
    return objective == Objective::pass_at_k ? exact_passk_gradient<double>(p, t.rewards, k)
                                             : exact_maxk_gradient<double>(p, t.rewards, k);
  };

  OptimumResult result;
  if (task.policy_mode == PolicyMode::shared) {
    detail::SimplexFn f = [&](std::span<const double> p) {
      double total = 0.0;
      for (const auto& t : task.prompts) total += prompt_objective(p, t, objective, k);
      return total / static_cast<double>(task.prompts.size());
    };
    detail::SimplexGrad g = [&](std::span<const double> p) {
      std::vector<double> total(v, 0.0);
      for (const auto& t : task.prompts) {
        const auto gi = grad_for(t, p);
        for (std::size_t i = 0; i < v; ++i) total[i] += gi[i] / static_cast<double>(task.prompts.size());
      }
      return total;
    };
    result.probabilities.push_back(detail::maximize_on_simplex(v, f, g, seed));
  } else {
    for (std::size_t i = 0; i < task.prompts.size(); ++i) {
      const RewardTable& t = task.prompts[i];
      detail::SimplexFn f = [&](std::span<const double> p) { return prompt_objective(p, t, objective, k); };
      detail::SimplexGrad g = [&](std::span<const double> p) { return grad_for(t, p); };
      result.probabilities.push_back(detail::maximize_on_simplex(v, f, g, seed + i));
    }
  }
  result.value = objective_value(task, result.probabilities, objective, k);
  return result;
}

}  // namespace rspo
