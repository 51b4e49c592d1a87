#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "causalx/error.hpp"
#include "causalx/stats.hpp"

using namespace causalx;

TEST(Welch, FrozenValues) {
  const std::vector<double> a = {0.1, 0.2, 0.3}, b = {0.2, 0.3, 0.4};
  const SignificanceResult r = welch_t_test(a, b);
  // var 0.01 each, se = sqrt(0.02 / 3), t = -0.1 / se = -sqrt(1.5); df = 4
  EXPECT_NEAR(r.t, -std::sqrt(1.5), 1e-12);
  EXPECT_NEAR(r.t, -1.2247448713915885, 1e-12);
  EXPECT_NEAR(r.df, 4.0, 1e-12);
  EXPECT_NEAR(r.p, 0.28786413472669087, 1e-10);
  EXPECT_EQ(r.decision, Decision::FailToReject);
  EXPECT_NEAR(r.mean_a, 0.2, 1e-15);
  EXPECT_NEAR(r.mean_b, 0.3, 1e-15);
}

TEST(Welch, StudentTTailByHand) {
  // df = 2: two-sided p = 1 - |t| / sqrt(2 + t^2)
  const std::vector<double> c = {0.0, 2.0}, d = {3.0, 5.0};
  const SignificanceResult r = welch_t_test(c, d);
  // var 2 each, se = sqrt(2/2 + 2/2) = sqrt(2), t = -3 / sqrt(2); df = 2
  const double t = -3.0 / std::sqrt(2.0);
  EXPECT_NEAR(r.t, t, 1e-12);
  EXPECT_NEAR(r.df, 2.0, 1e-12);
  EXPECT_NEAR(r.p, 1.0 - std::abs(t) / std::sqrt(2.0 + t * t), 1e-10);
}

TEST(Welch, IdenticalGroups) {
  const std::vector<double> a = {0.5, 0.6, 0.7, 0.8};
  const SignificanceResult r = welch_t_test(a, a);
  EXPECT_EQ(r.t, 0.0);
  EXPECT_NEAR(r.p, 1.0, 1e-12);
  EXPECT_EQ(r.decision, Decision::FailToReject);
}

TEST(Welch, ExtremeSeparation) {
  const std::vector<double> a = {0.10, 0.11, 0.12, 0.10, 0.11};
  const std::vector<double> b = {0.90, 0.91, 0.92, 0.90, 0.91};
  const SignificanceResult r = welch_t_test(a, b);
  EXPECT_LT(r.p, 1e-6);
  EXPECT_EQ(r.decision, Decision::Reject);
}

TEST(Welch, ZeroVariance) {
  const std::vector<double> a = {0.3, 0.3}, b = {0.3, 0.3}, c = {0.4, 0.4};
  EXPECT_EQ(welch_t_test(a, b).p, 1.0);
  const SignificanceResult r = welch_t_test(a, c);
  EXPECT_EQ(r.p, 0.0);
  EXPECT_EQ(r.decision, Decision::Reject);
  EXPECT_TRUE(std::isinf(r.t) && r.t < 0);
}

TEST(Welch, Symmetry) {
  const std::vector<double> a = {0.31, 0.42, 0.25, 0.39}, b = {0.55, 0.47, 0.61};
  const SignificanceResult ab = welch_t_test(a, b), ba = welch_t_test(b, a);
  EXPECT_DOUBLE_EQ(ab.t, -ba.t);
  EXPECT_DOUBLE_EQ(ab.p, ba.p);
  EXPECT_DOUBLE_EQ(ab.df, ba.df);
}

TEST(Welch, InvalidInput) {
  const std::vector<double> one = {0.1}, two = {0.1, 0.2};
  const std::vector<double> bad = {0.1, std::nan("")};
  EXPECT_THROW(welch_t_test(one, two), ValidationError);
  EXPECT_THROW(welch_t_test(two, one), ValidationError);
  EXPECT_THROW(welch_t_test(two, bad), ValidationError);
  EXPECT_THROW(welch_t_test(two, two, 0.0), ValidationError);
  EXPECT_THROW(welch_t_test(two, two, 1.0), ValidationError);
}

TEST(Summary, MeanAndStddev) {
  const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(v), 5.0);
  EXPECT_DOUBLE_EQ(sample_stddev(v), std::sqrt(32.0 / 7.0));
  const std::vector<double> single = {3.0};
  EXPECT_EQ(sample_stddev(single), 0.0);
  EXPECT_EQ(to_string(Decision::Reject), "REJECT");
  EXPECT_EQ(to_string(Decision::FailToReject), "FTR");
}
