#include "rspo/combinatorics.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace rspo {
namespace {

TEST(Binom, SmallCases) {
  EXPECT_EQ(binom(5, 2), 10);
  EXPECT_EQ(binom(3, 5), 0);
  EXPECT_EQ(binom(0, 0), 1);
  EXPECT_THROW(binom(-1, 0), std::invalid_argument);
  EXPECT_THROW(binom(3, -1), std::invalid_argument);
}

TEST(Binom, MatchesPascalTriangle) {
  // Build rows of Pascal's triangle by addition only.
  std::vector<BigInt> row{1};
  for (int n = 1; n <= 50; ++n) {
    std::vector<BigInt> next(row.size() + 1, 0);
    for (std::size_t i = 0; i < row.size(); ++i) {
      next[i] += row[i];
      next[i + 1] += row[i];
    }
    row = std::move(next);
  }
  for (int k = 0; k <= 50; ++k) EXPECT_EQ(binom(50, k), row[static_cast<std::size_t>(k)]) << "k=" << k;
  EXPECT_EQ(binom(50, 25), BigInt("126410606437752"));
}

TEST(BinomAs, DoubleAndRational) {
  EXPECT_DOUBLE_EQ(binom_as<double>(50, 25), 126410606437752.0);
  EXPECT_EQ(binom_as<Rational>(10, 3), Rational(120));
  EXPECT_EQ(binom_as<double>(2, 3), 0.0);
}

TEST(BinomRatioProduct, KnownValues) {
  EXPECT_EQ(binom_ratio_product<double>(16, 1, 2), 1.0);
  EXPECT_EQ(binom_ratio_product<double>(16, 16, 2), 0.0);
  const Rational expected(binom(40, 7), binom(49, 7));
  EXPECT_EQ(binom_ratio_product<Rational>(50, 10, 8), expected);
  EXPECT_NEAR(binom_ratio_product<double>(50, 10, 8), expected.convert_to<double>(), 1e-15);
}

TEST(BinomRatioProduct, KOneIsOne) {
  for (int n = 1; n <= 10; ++n) {
    for (int c = 0; c <= n; ++c) EXPECT_EQ(binom_ratio_product<double>(n, c, 1), 1.0);
  }
}

TEST(BinomRatioProduct, ZeroWhenTooFewIncorrect) {
  // n - c < k - 1 means the numerator choose is out of range.
  EXPECT_EQ(binom_ratio_product<double>(8, 7, 3), 0.0);
  EXPECT_EQ(binom_ratio_product<Rational>(8, 7, 3), Rational(0));
  EXPECT_GT(binom_ratio_product<double>(8, 6, 3), 0.0);
}

TEST(BinomRatioProduct, LargeNStaysFinite) {
  // Factorial forms would overflow here.
  const double r = binom_ratio_product<double>(2000, 300, 64);
  EXPECT_TRUE(std::isfinite(r));
  EXPECT_GT(r, 0.0);
  EXPECT_LT(r, 1.0);
}

TEST(BinomRatioProduct, RejectsBadArguments) {
  EXPECT_THROW(binom_ratio_product<double>(0, 0, 1), std::invalid_argument);
  EXPECT_THROW(binom_ratio_product<double>(4, 5, 2), std::invalid_argument);
  EXPECT_THROW(binom_ratio_product<double>(4, 1, 0), std::invalid_argument);
  EXPECT_THROW(binom_ratio_product<double>(4, 1, 5), std::invalid_argument);
}

TEST(MakeBinomRatio, CarriesOperandsAndValue) {
  const BinomRatio r = make_binom_ratio(4, 2, 2);
  EXPECT_EQ(r.numerator.top, 2);
  EXPECT_EQ(r.numerator.choose, 1);
  EXPECT_EQ(r.denominator.top, 3);
  EXPECT_EQ(r.denominator.choose, 1);
  EXPECT_EQ(r.exact(), Rational(2, 3));
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-15);
}

TEST(HockeyStick, KnownValues) {
  EXPECT_EQ(hockey_stick_sum(4, 2), 3);
  EXPECT_EQ(hockey_stick_sum(2, 3), 0);
  EXPECT_EQ(hockey_stick_sum(9, 4), 56);
}

TEST(HockeyStick, DirectSummation) {
  for (int k = 2; k <= 16; ++k) {
    for (int i = 0; i <= 40; ++i) {
      BigInt direct = 0;
      for (int j = 1; j <= i - 1; ++j) direct += binom(j - 1, k - 2);
      EXPECT_EQ(hockey_stick_sum(i, k), direct) << "i=" << i << " k=" << k;
    }
  }
}

}  // namespace
}  // namespace rspo
