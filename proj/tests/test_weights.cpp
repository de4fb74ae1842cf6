#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "beurling/errors.hpp"
#include "beurling/weights.hpp"

using namespace beurling;

TEST(PowerWeight, Values) {
  EXPECT_EQ(Weight::power(0)(-7), 1.0);
  EXPECT_DOUBLE_EQ(Weight::power(1)(3), 4.0);
  EXPECT_DOUBLE_EQ(Weight::power(0.5)(-8), 3.0);
  EXPECT_THROW(Weight::power(-0.1), PreconditionError);
}

TEST(AsymWeight, Values) {
  EXPECT_DOUBLE_EQ(Weight::asymmetric(0, 2)(-3), 16.0);
  EXPECT_DOUBLE_EQ(Weight::asymmetric(1, 1)(5), 6.0);
  EXPECT_THROW(Weight::asymmetric(2, 1), PreconditionError);
}

TEST(AsymWeight, NegativeRatioStrictlyIncreasing) {
  const Weight w = Weight::asymmetric(0.5, 2);
  double prev = 0.0;
  for (int n = 1; n <= 100; ++n) {
    const double r = w(-n) / std::pow(1.0 + n, 0.5);
    EXPECT_GT(r, prev);
    prev = r;
  }
}

TEST(Weights, AtLeastOneOnLargeWindow) {
  for (const Weight& w : {Weight::power(0), Weight::power(0.7), Weight::asymmetric(0.3, 2.5)})
    for (int n = -10000; n <= 10000; n += 7) EXPECT_GE(w(n), 1.0);
}

TEST(TabulatedWeight, TailRulesAndErrors) {
  TailRule pos{TailRule::Kind::power, 1.0, 1.0};
  TailRule neg{TailRule::Kind::exponential, 1.0, std::log(2.0)};
  const Weight w = Weight::tabulated({{-1, 2.0}, {0, 1.0}, {1, 2.0}}, pos, neg);
  EXPECT_DOUBLE_EQ(w(0), 1.0);
  EXPECT_DOUBLE_EQ(w(5), 6.0);
  EXPECT_NEAR(w(-10), 1024.0, 1e-9);
  const Weight bare = Weight::tabulated({{0, 1.0}, {1, 1.0}}, {}, {});
  EXPECT_THROW(bare(2), PreconditionError);
  EXPECT_THROW(Weight::tabulated({{0, 0.5}}, {}, {}), PreconditionError);
}

TEST(ConditionWs, Examples) {
  auto r = check_condition_Ws(Weight::power(1), 1, 100);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.max_deviation, 0.0);
  EXPECT_TRUE(check_condition_Ws(Weight::asymmetric(1, 3), 1, 100).pass);
  r = check_condition_Ws(Weight::power(2), 1, 10);
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.first_violation.has_value());
  EXPECT_EQ(*r.first_violation, 1);
}

TEST(ConditionWs, AsymmetricWeightsPassAtTheirExponent) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double s = u(rng), t = s + u(rng);
    EXPECT_TRUE(check_condition_Ws(Weight::asymmetric(s, t), s, 200).pass) << s << " " << t;
  }
}

TEST(ConditionA, PolynomialIsConsistent) {
  const auto r = check_condition_A(Weight::power(2), {0.1}, 10000);
  ASSERT_EQ(r.epsilon_rows.size(), 1u);
  EXPECT_TRUE(r.epsilon_rows[0].consistent);
  EXPECT_TRUE(r.pass);
  // (1+n)^2 e^{-0.1√n} peaks where √n ≈ 40
  EXPECT_NEAR(static_cast<double>(r.epsilon_rows[0].argmax), 1600.0, 5.0);
}

TEST(ConditionA, ExponentialIsInconsistent) {
  TailRule neg{TailRule::Kind::exponential, 1.0, std::log(2.0)};
  const Weight w = Weight::tabulated({{0, 1.0}}, TailRule{TailRule::Kind::power, 1.0, 0.0}, neg);
  const auto r = check_condition_A(w, {0.5}, 200);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.epsilon_rows[0].argmax, 200);
  EXPECT_FALSE(r.epsilon_rows[0].tail_decreasing);
}

TEST(ConditionA, ConstantWeightSupAtFirstIndex) {
  const auto r = check_condition_A(Weight::power(0), {0.3, 1.0}, 500);
  EXPECT_TRUE(r.pass);
  for (const auto& row : r.epsilon_rows) {
    EXPECT_EQ(row.argmax, 1);
    EXPECT_DOUBLE_EQ(row.sup, std::exp(-row.epsilon));
  }
}

TEST(Regularity, Examples) {
  EXPECT_EQ(regularity_partial_sum(Weight::power(0), 50), 0.0);
  const double a = regularity_partial_sum(Weight::power(1), 1000);
  const double b = regularity_partial_sum(Weight::power(1), 2000);
  EXPECT_GT(b, a);
  EXPECT_LT(b - a, 0.02);
}

TEST(Regularity, ExponentialWeightKeepsGrowing) {
  TailRule e{TailRule::Kind::exponential, 1.0, 1.0};
  const Weight w = Weight::tabulated({{0, 1.0}}, e, e);
  // ∑ |n|/(1+n²) diverges like 2 ln N
  double oracle = 0.0;
  for (int n = 1; n <= 100; ++n) oracle += 2.0 * n / (1.0 + n * n);
  EXPECT_NEAR(regularity_partial_sum(w, 100), oracle, 1e-9);
  EXPECT_GT(regularity_partial_sum(w, 200) - regularity_partial_sum(w, 100), 1.0);
}

TEST(Regularity, NondecreasingInWindow) {
  for (const Weight& w : {Weight::power(0.4), Weight::asymmetric(0.2, 1.7), Weight::power(2.5)}) {
    double prev = -1.0;
    for (int N = 1; N <= 300; N += 13) {
      const double v = regularity_partial_sum(w, N);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Submultiplicative, PowerWeights) {
  for (double s : {0.5, 1.0, 2.0}) EXPECT_TRUE(check_submultiplicative(Weight::power(s), 50).pass);
  const auto r = check_submultiplicative(Weight::power(0), 10);
  EXPECT_TRUE(r.pass);
  EXPECT_DOUBLE_EQ(r.worst_ratio, 1.0);
}

TEST(Submultiplicative, RandomExponents) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 10; ++i) EXPECT_TRUE(check_submultiplicative(Weight::power(u(rng)), 30).pass);
}

TEST(Submultiplicative, TabulatedViolation) {
  const Weight w = Weight::tabulated({{-2, 1.0}, {-1, 1.0}, {0, 1.0}, {1, 1.0}, {2, 3.0}}, {}, {});
  const auto r = check_submultiplicative(w, 1);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.worst_m, 1);
  EXPECT_EQ(r.worst_n, 1);
  EXPECT_DOUBLE_EQ(r.worst_ratio, 3.0);
}

TEST(WeightJson, RoundTripAndStrictKeys) {
  for (const Weight& w : {Weight::power(0.5), Weight::asymmetric(0.5, 2.0)}) {
    const Weight back = weight_from_json(to_json(w));
    for (int n = -20; n <= 20; ++n) EXPECT_DOUBLE_EQ(back(n), w(n));
  }
  const Weight tab = Weight::tabulated({{0, 1.0}, {1, 2.0}}, {TailRule::Kind::power, 1.0, 1.0},
                                       {TailRule::Kind::exponential, 1.0, 0.5});
  const Weight back = weight_from_json(to_json(tab));
  for (int n = -20; n <= 20; ++n) EXPECT_DOUBLE_EQ(back(n), tab(n));
  EXPECT_THROW(weight_from_json({{"kind", "symmetric_power"}, {"s", 1}, {"extra", 0}}), ConfigError);
}
