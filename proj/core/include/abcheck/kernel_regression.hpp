#pragma once

// Nadaraya-Watson regression with a Gaussian kernel.

#include <cstddef>
#include <span>
#include <vector>

namespace abcheck {

struct RegressionPoint {
  double x = 0.0;
  double y = 0.0;
};

struct CurveSample {
  double x = 0.0;
  double y = 0.0;
};

/// Evaluates sum w_i y_i / sum w_i, w_i = exp(-(x - x_i)^2 / (2 h^2)), at
/// every grid point. Weights are shifted by the largest exponent, so far
/// from the data the estimate tends to the nearest point's value instead of
/// 0/0. Throws ConfigError on empty input or a non-positive bandwidth.
[[nodiscard]] std::vector<CurveSample> kernel_regression(std::span<const RegressionPoint> points,
                                                         double bandwidth,
                                                         std::span<const double> grid);

/// 1.06 * sd * n^(-1/5). Falls back to max(0.1 * |mean|, 1e-2) when the
/// sample has zero spread. Throws ConfigError on empty input.
[[nodiscard]] double silverman_bandwidth(std::span<const double> x);

/// n points log-spaced over [lo, hi]; a single point when lo >= hi.
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace abcheck
