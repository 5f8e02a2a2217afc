#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "abcheck/detector.hpp"
#include "abcheck/rng.hpp"

using namespace abcheck;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smooth positive sequence with noise and occasional spikes.
std::vector<double> random_sequence(CounterRng& rng, std::size_t n) {
  std::vector<double> d(n);
  const double level = std::exp(rng.normal(0.0, 4.0));
  for (std::size_t i = 0; i < n; ++i) {
    double v = level * (1.0 + 0.3 * std::sin(0.05 * static_cast<double>(i))) *
               std::abs(rng.normal(1.0, 0.01));
    if (rng.uniform01() < 0.03) v *= 1.0 + 10.0 * rng.uniform01();
    d[i] = v;
  }
  return d;
}

std::vector<DetectorVerdict> run(const DetectorConfig& c, const std::vector<double>& d) {
  Detector det(c);
  std::vector<DetectorVerdict> out;
  for (double x : d) out.push_back(det.detect_step(x));
  return out;
}

DetectorConfig small_window() {
  DetectorConfig c;
  c.window_p = 2;
  return c;
}

}  // namespace

TEST(Jump, Examples) {
  EXPECT_DOUBLE_EQ(compute_jump(0.01, 0.02), 1.0);
  EXPECT_EQ(compute_jump(0.3, 0.3), 0.0);
  EXPECT_EQ(compute_jump(0.0, 0.5), kInf);
  EXPECT_EQ(compute_jump(0.0, 0.0), 0.0);
}

TEST(VarianceRatio, Examples) {
  const std::vector<double> flat(11, 2.5);
  EXPECT_EQ(compute_variance_ratio(flat, 2.5), 1.0);
  const std::vector<double> zeros(11, 0.0);
  EXPECT_EQ(compute_variance_ratio(zeros, 1.0), kInf);
  const std::vector<double> w{1, 2, 3};
  EXPECT_DOUBLE_EQ(compute_variance_ratio(w, 4), 1.0);
  EXPECT_THROW((void)compute_variance_ratio(std::vector<double>{1.0}, 2.0), ConfigError);
}

TEST(DetectorConfig, Validation) {
  DetectorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.gamma_up = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.gamma_down = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.tau_v0 = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(parse_detector_mode("jump-only"), DetectorMode::kJumpOnly);
  EXPECT_THROW((void)parse_detector_mode("either"), ConfigError);
}

TEST(Detector, WarmupNeedsFullWindow) {
  Detector det(small_window());
  for (int i = 0; i < 3; ++i) {
    const auto v = det.detect_step(1.0 + i);
    EXPECT_TRUE(v.warmup);
    EXPECT_FALSE(v.flagged);
    EXPECT_FALSE(v.j_value.has_value());
  }
  EXPECT_FALSE(det.warming_up());
  EXPECT_FALSE(det.detect_step(4.0).warmup);
}

TEST(Detector, QuietStepsLowerThresholds) {
  Detector det(small_window());
  for (double d : {1.0, 2.0, 3.0}) (void)det.detect_step(d);
  // J = 1/3 and V = Var(2,3,4)/Var(1,2,3) = 1: neither exceeds.
  const auto v = det.detect_step(4.0);
  EXPECT_FALSE(v.flagged);
  EXPECT_DOUBLE_EQ(*v.j_value, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(v.thresholds_after.jump, 0.95);
  EXPECT_DOUBLE_EQ(v.thresholds_after.variance, 0.95);

  Detector up(small_window());
  for (double d : {1.0, 2.0, 3.0}) (void)up.detect_step(d);
  const auto w = up.detect_step(3.5);  // J = 1/6, V = Var(2,3,3.5)/1 = 0.583
  EXPECT_FALSE(w.flagged);
  EXPECT_DOUBLE_EQ(w.thresholds_after.jump, 0.95);

  Detector var(small_window());
  for (double d : {1.0, 1.0, 1.0}) (void)var.detect_step(d);
  const auto x = var.detect_step(1.0);  // J = 0, V = 1 (0/0)
  EXPECT_FALSE(x.flagged);
  EXPECT_DOUBLE_EQ(x.thresholds_after.variance, 0.95);
}

TEST(Detector, OnlyJumpExceedsGivesGammaUp) {
  DetectorConfig c = small_window();
  Detector det(c);
  for (double d : {1.0, 3.0, 1.0}) (void)det.detect_step(d);
  // J = (2.5 - 1) / 1 = 1.5 > 1; V = Var(3, 1, 2.5) / Var(1, 3, 1) = 1.0833/1.3333 < 1.
  const auto v = det.detect_step(2.5);
  EXPECT_FALSE(v.flagged);
  EXPECT_DOUBLE_EQ(v.thresholds_after.jump, 1.4);
  EXPECT_DOUBLE_EQ(v.thresholds_after.variance, 0.95);
}

TEST(Detector, InfiniteSentinelsFlag) {
  Detector det(small_window());
  for (int i = 0; i < 3; ++i) (void)det.detect_step(0.0);
  const auto v = det.detect_step(1.0);
  EXPECT_TRUE(v.flagged);
  EXPECT_EQ(*v.j_value, kInf);
  EXPECT_EQ(*v.v_value, kInf);
  EXPECT_TRUE(std::isfinite(v.thresholds_after.jump));
}

TEST(Detector, NonFiniteFlagsWithoutStoring) {
  Detector det(small_window());
  for (double d : {1.0, 2.0, 3.0}) (void)det.detect_step(d);
  const auto before = det.window().snapshot();
  const auto v = det.detect_step(std::numeric_limits<double>::quiet_NaN());
  EXPECT_TRUE(v.flagged);
  EXPECT_TRUE(v.non_finite);
  EXPECT_EQ(det.window().snapshot(), before);
  // Non-finite values flag during warm-up too.
  Detector fresh;
  EXPECT_TRUE(fresh.detect_step(kInf).flagged);
}

TEST(Detector, StrictRuleHoldsThresholdsOnFlag) {
  DetectorConfig c = small_window();
  c.adapt_on_flag = false;
  Detector det(c);
  for (double d : {1.0, 1.1, 1.0}) (void)det.detect_step(d);
  const auto v = det.detect_step(50.0);
  ASSERT_TRUE(v.flagged);
  EXPECT_EQ(v.thresholds_after.jump, 1.0);
  EXPECT_EQ(v.thresholds_after.variance, 1.0);

  c.adapt_on_flag = true;
  Detector adapt(c);
  for (double d : {1.0, 1.1, 1.0}) (void)adapt.detect_step(d);
  const auto w = adapt.detect_step(50.0);
  ASSERT_TRUE(w.flagged);
  EXPECT_DOUBLE_EQ(w.thresholds_after.jump, 1.4);
  EXPECT_DOUBLE_EQ(w.thresholds_after.variance, 1.4);
}

TEST(Detector, FlagImpliesBothIndicatorsExceeded) {
  CounterRng rng(5);
  for (int s = 0; s < 100; ++s) {
    const auto d = random_sequence(rng, 300);
    for (const auto& v : run({}, d)) {
      if (!v.flagged) continue;
      ASSERT_TRUE(v.j_value && v.v_value);
      EXPECT_GT(*v.j_value, v.thresholds_before.jump);
      EXPECT_GT(*v.v_value, v.thresholds_before.variance);
    }
  }
}

TEST(Detector, ScaleInvariance) {
  CounterRng rng(2024);
  for (int s = 0; s < 1000; ++s) {
    const auto d = random_sequence(rng, 200);
    const double c = std::exp(rng.normal(0.0, 25.0));
    std::vector<double> scaled(d);
    for (double& x : scaled) x *= c;
    const auto a = run({}, d);
    const auto b = run({}, scaled);
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ(a[i].flagged, b[i].flagged) << "sequence " << s << " step " << i;
      if (a[i].j_value) {
        ASSERT_NEAR(*a[i].j_value, *b[i].j_value, 1e-9 * (1.0 + std::abs(*a[i].j_value)));
        ASSERT_NEAR(*a[i].v_value, *b[i].v_value, 1e-9 * (1.0 + std::abs(*a[i].v_value)));
      }
    }
  }
}

TEST(Detector, ThresholdFloorAndCeiling) {
  CounterRng rng(9);
  const DetectorConfig c;
  for (int s = 0; s < 200; ++s) {
    const auto d = random_sequence(rng, 300);
    Detector det(c);
    std::size_t updates = 0;
    for (double x : d) {
      const auto v = det.detect_step(x);
      if (v.warmup) continue;
      ++updates;
      for (double tau : {v.thresholds_after.jump, v.thresholds_after.variance}) {
        ASSERT_GT(tau, 0.0);
        ASSERT_TRUE(std::isfinite(tau));
        ASSERT_GE(tau, c.tau_j0 * std::pow(c.gamma_down, updates) * (1 - 1e-12));
        ASSERT_LE(tau, c.tau_j0 * std::pow(c.gamma_up, updates) * (1 + 1e-12));
      }
    }
  }
}

TEST(Detector, AndRuleFlagsSubsetOfSingleIndicators) {
  CounterRng rng(77);
  DetectorConfig both;
  DetectorConfig jump;
  jump.mode = DetectorMode::kJumpOnly;
  DetectorConfig var;
  var.mode = DetectorMode::kVarianceOnly;
  for (int s = 0; s < 300; ++s) {
    const auto d = random_sequence(rng, 300);
    const auto a = run(both, d);
    const auto j = run(jump, d);
    const auto v = run(var, d);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (a[i].flagged) {
        ASSERT_TRUE(j[i].flagged);
        ASSERT_TRUE(v[i].flagged);
      }
    }
  }
}

TEST(Detector, ResetAndDeterminism) {
  CounterRng rng(1);
  const auto d = random_sequence(rng, 150);
  Detector det;
  std::vector<bool> first;
  for (double x : d) first.push_back(det.detect_step(x).flagged);
  det.reset();
  EXPECT_TRUE(det.warming_up());
  EXPECT_EQ(det.thresholds().jump, 1.0);
  std::vector<bool> second;
  for (double x : d) second.push_back(det.detect_step(x).flagged);
  EXPECT_EQ(first, second);

  Detector mid;
  for (std::size_t i = 0; i < 40; ++i) (void)mid.detect_step(d[i]);
  mid.reset();
  std::vector<bool> third;
  for (double x : d) third.push_back(mid.detect_step(x).flagged);
  EXPECT_EQ(first, third);
}
