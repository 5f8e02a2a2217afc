#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "abcheck/core.hpp"
#include "abcheck/kernel_regression.hpp"

using namespace abcheck;

TEST(KernelRegression, SinglePointIsConstant) {
  const std::vector<RegressionPoint> pts{{2.0, 1.0}};
  const std::vector<double> grid{0.01, 1.0, 2.0, 50.0, 1e4};
  for (const auto& s : kernel_regression(pts, 0.5, grid)) EXPECT_EQ(s.y, 1.0);
}

TEST(KernelRegression, AllZeros) {
  const std::vector<RegressionPoint> pts{{0.5, 0.0}, {1.0, 0.0}, {7.0, 0.0}};
  for (const auto& s : kernel_regression(pts, 1.0, log_grid(0.01, 10.0, 20))) EXPECT_EQ(s.y, 0.0);
}

TEST(KernelRegression, TwoClusters) {
  std::vector<RegressionPoint> pts;
  for (int i = 0; i < 10; ++i) {
    pts.push_back({0.1 * i, 0.0});
    pts.push_back({10.0 + 0.1 * i, 1.0});
  }
  const std::vector<double> grid{0.0, 5.2, 10.0};
  const auto c = kernel_regression(pts, 0.5, grid);
  EXPECT_LT(c[0].y, 1e-6);
  EXPECT_GT(c[2].y, 1.0 - 1e-6);
  EXPECT_GT(c[1].y, 0.0);
  EXPECT_LT(c[1].y, 1.0);
}

TEST(KernelRegression, HandWeights) {
  // Two points one bandwidth apart: weight ratio e^{-1/2} at x = 0.
  const std::vector<RegressionPoint> pts{{0.0, 0.0}, {1.0, 1.0}};
  const std::vector<double> grid{0.0};
  const double w = std::exp(-0.5);
  EXPECT_NEAR(kernel_regression(pts, 1.0, grid)[0].y, w / (1.0 + w), 1e-15);
}

TEST(KernelRegression, FarFromDataTakesNearestValue) {
  const std::vector<RegressionPoint> pts{{1.0, 0.0}, {2.0, 1.0}};
  const std::vector<double> grid{1e6};
  const auto c = kernel_regression(pts, 0.01, grid);
  EXPECT_EQ(c[0].y, 1.0);
}

TEST(KernelRegression, OutputsInUnitInterval) {
  std::vector<RegressionPoint> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({std::pow(1.1, i) * 0.01, double(i % 3 == 0)});
  for (const auto& s : kernel_regression(pts, 0.3, log_grid(0.01, 100.0, 100))) {
    ASSERT_GE(s.y, 0.0);
    ASSERT_LE(s.y, 1.0);
  }
}

TEST(KernelRegression, RejectsBadInput) {
  const std::vector<double> grid{1.0};
  EXPECT_THROW((void)kernel_regression({}, 1.0, grid), ConfigError);
  const std::vector<RegressionPoint> pts{{1.0, 1.0}};
  EXPECT_THROW((void)kernel_regression(pts, 0.0, grid), ConfigError);
}

TEST(Bandwidth, Silverman) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const double sd = std::sqrt(2.5);
  EXPECT_NEAR(silverman_bandwidth(x), 1.06 * sd * std::pow(5.0, -0.2), 1e-12);
  const std::vector<double> flat{4, 4, 4};
  EXPECT_NEAR(silverman_bandwidth(flat), 0.4, 1e-15);
  const std::vector<double> tiny{0.001, 0.001};
  EXPECT_EQ(silverman_bandwidth(tiny), 1e-2);
  EXPECT_THROW((void)silverman_bandwidth(std::vector<double>{}), ConfigError);
}

TEST(LogGrid, Endpoints) {
  const auto g = log_grid(0.01, 100.0, 5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_NEAR(g[0], 0.01, 1e-15);
  EXPECT_NEAR(g[2], 1.0, 1e-12);
  EXPECT_NEAR(g[4], 100.0, 1e-12);
  EXPECT_EQ(log_grid(3.0, 3.0, 100).size(), 1u);
}
