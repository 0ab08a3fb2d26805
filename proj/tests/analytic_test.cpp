#include "rspo/analytic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

namespace rspo {
namespace {

using Objective = std::function<double(std::span<const double>)>;

// Central differences in logit space.
std::vector<double> finite_difference(const Objective& f, const std::vector<double>& logits, double h = 1e-5) {
  std::vector<double> g(logits.size());
  for (std::size_t j = 0; j < logits.size(); ++j) {
    auto up = logits;
    auto down = logits;
    up[j] += h;
    down[j] -= h;
    g[j] = (f(softmax(up)) - f(softmax(down))) / (2 * h);
  }
  return g;
}

// E[max of k draws] by enumerating all V^k ordered tuples.
double brute_force_max_at_k(const std::vector<double>& p, const std::vector<double>& r, int k) {
  const std::size_t v = p.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  double total = 0.0;
  while (true) {
    double prob = 1.0;
    double best = -1e300;
    for (auto y : idx) {
      prob *= p[y];
      best = std::max(best, r[y]);
    }
    total += prob * best;
    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] == v) idx[pos++] = 0;
    if (pos == idx.size()) break;
  }
  return total;
}

TEST(BestOfK, DiceExample) {
  const std::vector<Rational> p(6, Rational(1, 6));
  const std::vector<Rational> r{1, 2, 3, 4, 5, 6};
  EXPECT_EQ(best_of_k_prob<Rational>(p, r, 3, 3), Rational(37, 216));
  const std::vector<double> pd(6, 1.0 / 6);
  const std::vector<double> rd{1, 2, 3, 4, 5, 6};
  EXPECT_NEAR(best_of_k_prob<double>(pd, rd, 3, 3), 37.0 / 216.0, 1e-12);
}

TEST(BestOfK, TrivialCases) {
  const std::vector<double> p{0.2, 0.5, 0.3};
  const std::vector<double> r{0.0, 1.0, 0.5};
  for (std::size_t y = 0; y < 3; ++y) EXPECT_NEAR(best_of_k_prob<double>(p, r, y, 1), p[y], 1e-15);
  const std::vector<double> delta{0.0, 1.0, 0.0};
  EXPECT_NEAR(best_of_k_prob<double>(delta, r, 1, 7), 1.0, 1e-15);
}

TEST(BestOfK, SumsToOneOverLevelsWithTies) {
  // Tied responses each count as best-of-k when they share the top reward.
  const std::vector<Rational> p{Rational(1, 4), Rational(1, 4), Rational(1, 2)};
  const std::vector<Rational> r{1, 1, 0};
  const Rational top = best_of_k_prob<Rational>(p, r, 0, 3) + best_of_k_prob<Rational>(p, r, 1, 3);
  EXPECT_EQ(top, Rational(1) - Rational(1, 8));
}

TEST(PassAtK, Exact) {
  EXPECT_EQ(pass_at_k_exact(0.0, 3), 0.0);
  EXPECT_EQ(pass_at_k_exact(1.0, 3), 1.0);
  EXPECT_DOUBLE_EQ(pass_at_k_exact(0.5, 2), 0.75);
  EXPECT_THROW(pass_at_k_exact(1.5, 2), std::invalid_argument);
}

TEST(PassWeight, Exact) {
  EXPECT_EQ(pass_weight_exact(0.3, 1), 1.0);
  EXPECT_EQ(pass_weight_exact(1.0, 4), 0.0);
  EXPECT_DOUBLE_EQ(pass_weight_exact(0.5, 10), 0.01953125);
}

TEST(MaxAtK, Dice) {
  const std::vector<Rational> p(6, Rational(1, 6));
  const std::vector<Rational> r{1, 2, 3, 4, 5, 6};
  EXPECT_EQ(max_at_k_exact<Rational>(p, r, 3), Rational(1071, 216));
  EXPECT_EQ(max_at_k_via_best_of_k<Rational>(p, r, 3), Rational(1071, 216));
}

TEST(MaxAtK, SimpleCases) {
  const std::vector<double> p{0.5, 0.5};
  const std::vector<double> r{0.0, 1.0};
  EXPECT_DOUBLE_EQ(max_at_k_exact<double>(p, r, 2), 0.75);
  const std::vector<double> p3{0.2, 0.5, 0.3};
  const std::vector<double> r3{0.7, 0.1, 0.4};
  EXPECT_NEAR(max_at_k_exact<double>(p3, r3, 1), 0.2 * 0.7 + 0.5 * 0.1 + 0.3 * 0.4, 1e-15);
}

TEST(MaxAtK, MatchesTupleEnumeration) {
  const std::vector<std::vector<double>> tables{{0.6, 1.0, 0.0}, {0.4, 0.4, 0.9}, {0.2, 0.2, 0.2}, {1.0, 0.0, 1.0}};
  const std::vector<double> p{0.3, 0.45, 0.25};
  for (const auto& r : tables) {
    for (int k = 1; k <= 5; ++k) {
      const double oracle = brute_force_max_at_k(p, r, k);
      EXPECT_NEAR(max_at_k_exact<double>(p, r, k), oracle, 1e-13);
      EXPECT_NEAR(max_at_k_via_best_of_k<double>(p, r, k), oracle, 1e-13);
    }
  }
}

TEST(MaxLevelDistribution, SumsToOne) {
  const std::vector<double> p{0.3, 0.45, 0.25};
  const std::vector<double> r{0.4, 0.4, 0.9};
  const auto dist = max_level_distribution<double>(p, r, 3);
  double total = 0.0;
  for (double d : dist) total += d;
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(PassGradient, WorkedExample) {
  const std::vector<double> p{0.5, 0.5};
  const std::vector<double> r{1.0, 0.0};
  const auto g = exact_passk_gradient<double>(p, r, 2);
  EXPECT_NEAR(g[0], 0.25, 1e-15);
  EXPECT_NEAR(g[1], -0.25, 1e-15);
}

TEST(PassGradient, SaturatedIsZero) {
  const std::vector<double> p{0.3, 0.7};
  const std::vector<double> r{1.0, 1.0};
  for (double g : exact_passk_gradient<double>(p, r, 2)) EXPECT_EQ(g, 0.0);
  const std::vector<double> bad{0.5, 1.0};
  EXPECT_THROW(exact_passk_gradient<double>(p, bad, 2), std::invalid_argument);
}

TEST(PassGradient, FiniteDifferences) {
  const std::vector<double> logits{0.3, -0.4, 0.8, 0.0};
  const std::vector<double> r{1, 0, 0, 1};
  for (int k = 1; k <= 6; ++k) {
    const Objective f = [&](std::span<const double> p) {
      double w = 0.0;
      for (std::size_t y = 0; y < p.size(); ++y) w += p[y] * r[y];
      return pass_at_k_exact(w, k);
    };
    const auto fd = finite_difference(f, logits);
    const auto g = exact_passk_gradient<double>(softmax(logits), r, k);
    for (std::size_t j = 0; j < r.size(); ++j) EXPECT_NEAR(g[j], fd[j], 1e-6) << "k=" << k << " j=" << j;
  }
}

TEST(MaxGradient, FiniteDifferences) {
  const std::vector<std::vector<double>> tables{{0.6, 1.0, 0.0}, {0.4, 0.4, 0.9}, {1.0, 0.0, 1.0}};
  const std::vector<std::vector<double>> logit_sets{{0.0, 0.0, 0.0}, {0.5, -1.0, 0.2}};
  for (const auto& r : tables) {
    for (const auto& logits : logit_sets) {
      for (int k = 1; k <= 5; ++k) {
        const Objective f = [&](std::span<const double> p) { return max_at_k_exact<double>(p, r, k); };
        const auto fd = finite_difference(f, logits);
        const auto g = exact_maxk_gradient<double>(softmax(logits), r, k);
        for (std::size_t j = 0; j < r.size(); ++j) EXPECT_NEAR(g[j], fd[j], 1e-6);
      }
    }
  }
}

TEST(MaxGradient, ConstantRewardsGiveZero) {
  const std::vector<double> p{0.2, 0.3, 0.5};
  const std::vector<double> r{0.7, 0.7, 0.7};
  for (double g : exact_maxk_gradient<double>(p, r, 3)) EXPECT_NEAR(g, 0.0, 1e-15);
}

TEST(MaxGradient, KOneIsExpectedRewardGradient) {
  const std::vector<double> p{0.2, 0.3, 0.5};
  const std::vector<double> r{0.1, 0.9, 0.4};
  const double mean = 0.2 * 0.1 + 0.3 * 0.9 + 0.5 * 0.4;
  const auto g = exact_maxk_gradient<double>(p, r, 1);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(g[j], p[j] * (r[j] - mean), 1e-15);
}

TEST(Entropy, Cases) {
  EXPECT_NEAR(entropy(std::vector<double>(8, 0.125)), std::log(8.0), 1e-15);
  EXPECT_NEAR(entropy(std::vector<double>{0.5, 0.5}), std::log(2.0), 1e-15);
  EXPECT_LT(entropy(std::vector<double>{1.0 - 1e-12, 1e-12}), 1e-10);
  EXPECT_EQ(entropy(std::vector<double>{1.0, 0.0}), 0.0);
}

TEST(PassAtKMetric, Cases) {
  EXPECT_EQ(pass_at_k_metric(5, 5, 3), 1.0);
  EXPECT_EQ(pass_at_k_metric(5, 0, 3), 0.0);
  EXPECT_NEAR(pass_at_k_metric(4, 2, 2), 5.0 / 6.0, 1e-15);
}

TEST(MaxAtKSampleMetric, Cases) {
  const std::vector<Rational> r{0, 1, 2, 3};
  EXPECT_EQ(max_at_k_sample_metric<Rational>(r, 2), Rational(7, 3));
  EXPECT_EQ(max_at_k_sample_metric<Rational>(r, 4), Rational(3));
  EXPECT_EQ(max_at_k_sample_metric<Rational>(r, 1), Rational(3, 2));
  const std::vector<Rational> tied{1, 1, 0, 2, 1};
  EXPECT_EQ(max_at_k_sample_metric<Rational>(tied, 5), Rational(2));
}

}  // namespace
}  // namespace rspo
