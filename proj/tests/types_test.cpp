#include "rspo/gradient.hpp"
#include "rspo/types.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace rspo {
namespace {

TEST(SortSample, OrderAndCounts) {
  const auto s = sort_sample(sample_from_rewards<double>({0.3, 0.1, 0.3}));
  EXPECT_EQ(s.order, (std::vector<std::size_t>{1, 0, 2}));
  EXPECT_EQ(s.c_lt, (std::vector<std::size_t>{0, 1, 1}));
  EXPECT_EQ(s.c_eq, (std::vector<std::size_t>{0, 1, 1}));
  EXPECT_TRUE(s.has_ties());
}

TEST(SortSample, TotalTie) {
  const auto s = sort_sample(sample_from_rewards<double>({1, 1, 1}));
  EXPECT_EQ(s.c_lt, (std::vector<std::size_t>{0, 0, 0}));
  EXPECT_EQ(s.c_eq, (std::vector<std::size_t>{2, 2, 2}));
}

TEST(SortSample, BinaryCounting) {
  const auto s = sort_sample(sample_from_rewards<double>({0, 1, 0, 1}));
  for (std::size_t p = 0; p < 4; ++p) {
    const double r = s.sorted_rewards[p];
    EXPECT_EQ(s.c_lt[p], r == 1.0 ? 2u : 0u);
  }
}

TEST(SortSample, UnsortRoundTrip) {
  const std::vector<double> rewards{0.5, -1.0, 2.0, 0.5, 0.0};
  const auto s = sort_sample(sample_from_rewards(rewards));
  EXPECT_EQ(s.unsort(s.sorted_rewards), rewards);
  EXPECT_FALSE(sort_sample(sample_from_rewards<double>({1, 2, 3})).has_ties());
}

TEST(SortSample, Rejections) {
  EXPECT_THROW(sort_sample(sample_from_rewards<double>({})), std::invalid_argument);
  EXPECT_THROW(sort_sample(sample_from_rewards<double>({0.0, std::numeric_limits<double>::quiet_NaN()})),
               std::invalid_argument);
}

TEST(RewardTable, Validation) {
  RewardTable ok{"x", {0, 1, 1}, RewardKind::binary};
  EXPECT_NO_THROW(ok.validate());
  EXPECT_TRUE(ok.is_binary());
  RewardTable bad{"x", {0, 0.5}, RewardKind::binary};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  RewardTable empty{"x", {}, RewardKind::continuous};
  EXPECT_THROW(empty.validate(), std::invalid_argument);
}

TEST(TaskSpec, PolicyIndexing) {
  TaskSpec t;
  t.name = "t";
  t.vocab_size = 2;
  t.prompts = {{"a", {0, 1}, RewardKind::binary}, {"b", {1, 0}, RewardKind::binary}};
  t.eval_k_list = {1, 2};
  t.policy_mode = PolicyMode::shared;
  EXPECT_EQ(t.num_policies(), 1u);
  EXPECT_EQ(t.policy_index(1), 0u);
  t.policy_mode = PolicyMode::per_prompt;
  EXPECT_EQ(t.num_policies(), 2u);
  EXPECT_EQ(t.policy_index(1), 1u);
  EXPECT_NO_THROW(t.validate());
  t.prompts[1].rewards = {1, 0, 0};
  EXPECT_THROW(t.validate(), std::invalid_argument);
}

TEST(DiscretePolicy, SoftmaxAndShiftInvariance) {
  const DiscretePolicy a(std::vector<double>{0.0, 1.0, -2.0});
  const DiscretePolicy b(std::vector<double>{100.0, 101.0, 98.0});
  double total = 0.0;
  for (std::size_t y = 0; y < 3; ++y) {
    EXPECT_NEAR(a.prob(y), b.prob(y), 1e-15);
    total += a.prob(y);
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
  // Large logits do not overflow.
  const DiscretePolicy big(std::vector<double>{1000.0, 0.0});
  EXPECT_NEAR(big.prob(0), 1.0, 1e-15);
}

TEST(DiscretePolicy, FromProbabilities) {
  const std::vector<double> p{0.2, 0.3, 0.5};
  const auto pol = DiscretePolicy::from_probabilities(p);
  for (std::size_t y = 0; y < 3; ++y) EXPECT_NEAR(pol.prob(y), p[y], 1e-15);
  EXPECT_THROW(DiscretePolicy::from_probabilities(std::vector<double>{0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(DiscretePolicy(std::vector<double>{std::numeric_limits<double>::infinity()}), std::invalid_argument);
}

TEST(GradientContribution, KnownValues) {
  const std::vector<double> probs{0.2, 0.3, 0.5};
  // All weights zero.
  auto s = make_sample<double>(std::vector<double>{1, 0}, std::vector<int>{0, 1});
  WeightVector<double> zero{{0.0, 0.0}, "t"};
  for (double g : gradient_contribution<double>(s, zero, probs)) EXPECT_EQ(g, 0.0);

  // Single sample with weight 1 on response 1 -> e(1) - pi.
  auto one = make_sample<double>(std::vector<double>{0, 1, 0}, std::vector<int>{1});
  WeightVector<double> w1{{1.0}, "t"};
  const auto g1 = gradient_contribution<double>(one, w1, probs);
  EXPECT_NEAR(g1[0], -0.2, 1e-15);
  EXPECT_NEAR(g1[1], 0.7, 1e-15);
  EXPECT_NEAR(g1[2], -0.5, 1e-15);

  // Two identical draws, weights [1,1] -> same as one.
  auto two = make_sample<double>(std::vector<double>{0, 1, 0}, std::vector<int>{1, 1});
  WeightVector<double> w2{{1.0, 1.0}, "t"};
  const auto g2 = gradient_contribution<double>(two, w2, probs);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(g2[j], g1[j], 1e-15);
}

TEST(GradientContribution, ExplicitDivisor) {
  const std::vector<double> probs{0.5, 0.5};
  auto s = make_sample<double>(std::vector<double>{1, 0}, std::vector<int>{0});
  WeightVector<double> w{{2.0}, "t"};
  const auto g = gradient_contribution<double>(s, w, probs, 4);
  EXPECT_NEAR(g[0], 0.25, 1e-15);
  EXPECT_NEAR(g[1], -0.25, 1e-15);
}

}  // namespace
}  // namespace rspo
