#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "abcheck/core.hpp"
#include "abcheck/rng.hpp"
#include "abcheck/tridiagonal.hpp"

using namespace abcheck;

namespace {

double residual_inf(const TridiagonalSystem& s, const std::vector<double>& x) {
  const std::size_t n = s.main.size();
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double ax = s.main[i] * x[i];
    if (i > 0) ax += s.sub[i] * x[i - 1];
    if (i + 1 < n) ax += s.super[i] * x[i + 1];
    r = std::max(r, std::abs(ax - s.rhs[i]));
  }
  return r;
}

}  // namespace

TEST(Tridiagonal, Identity) {
  TridiagonalSystem s{{0, 0, 0}, {1, 1, 1}, {0, 0, 0}, {4, -5, 6}};
  EXPECT_EQ(solve_tridiagonal(s), (std::vector<double>{4, -5, 6}));
}

TEST(Tridiagonal, TwoByTwo) {
  TridiagonalSystem s{{0, 1}, {2, 2}, {1, 0}, {3, 3}};
  const auto x = solve_tridiagonal(s);
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(Tridiagonal, RandomDominantResidual) {
  CounterRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 50;
    TridiagonalSystem s;
    s.sub.resize(n);
    s.main.resize(n);
    s.super.resize(n);
    s.rhs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.sub[i] = rng.uniform01() * 2 - 1;
      s.super[i] = rng.uniform01() * 2 - 1;
      const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
      s.main[i] = sign * (std::abs(s.sub[i]) + std::abs(s.super[i]) + 0.1 + rng.uniform01());
      s.rhs[i] = rng.normal(0.0, 100.0);
    }
    const auto x = solve_tridiagonal(s);
    double rhs_inf = 0.0;
    for (double v : s.rhs) rhs_inf = std::max(rhs_inf, std::abs(v));
    EXPECT_LE(residual_inf(s, x), 1e-10 * rhs_inf);
  }
}

TEST(Tridiagonal, ZeroPivotIsSolverFailure) {
  TridiagonalSystem s{{0, 1}, {1, 1}, {1, 0}, {1, 1}};
  EXPECT_THROW((void)solve_tridiagonal(s), SolverFailure);
  TridiagonalSystem nan{{0, 0}, {std::numeric_limits<double>::quiet_NaN(), 1}, {0, 0}, {1, 1}};
  EXPECT_THROW((void)solve_tridiagonal(nan), SolverFailure);
}

TEST(Tridiagonal, LengthMismatch) {
  TridiagonalSystem s{{0}, {1, 1}, {0, 0}, {1, 1}};
  EXPECT_THROW((void)solve_tridiagonal(s), ConfigError);
}
