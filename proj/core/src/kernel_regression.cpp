#include "abcheck/kernel_regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "abcheck/core.hpp"
#include "abcheck/detector.hpp"

namespace abcheck {

std::vector<CurveSample> kernel_regression(std::span<const RegressionPoint> points,
                                           double bandwidth, std::span<const double> grid) {
  if (points.empty()) throw ConfigError("kernel_regression: no points");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ConfigError("kernel_regression: bandwidth must be positive and finite");
  }
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  std::vector<CurveSample> out;
  out.reserve(grid.size());
  std::vector<double> expo(points.size());
  for (double x : grid) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = x - points[i].x;
      expo[i] = -d * d * inv;
      top = std::max(top, expo[i]);
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double w = std::exp(expo[i] - top);
      num += w * points[i].y;
      den += w;
    }
    out.push_back({x, num / den});
  }
  return out;
}

double silverman_bandwidth(std::span<const double> x) {
  if (x.empty()) throw ConfigError("silverman_bandwidth: no samples");
  const double sd = std::sqrt(sample_variance(x));
  const double n = static_cast<double>(x.size());
  const double h = 1.06 * sd * std::pow(n, -0.2);
  if (h > 0.0 && std::isfinite(h)) return h;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  return std::max(0.1 * std::abs(mean), 1e-2);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !std::isfinite(hi)) throw ConfigError("log_grid: need 0 < lo, finite hi");
  if (n == 0) return {};
  if (lo >= hi || n == 1) return {lo};
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace abcheck
