#include "abcheck/detector.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace abcheck {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double guarded_ratio(double num, double den, double zero_over_zero) {
  if (den < kZeroGuard) return num < kZeroGuard ? zero_over_zero : kInf;
  return num / den;
}

}  // namespace

DetectorMode parse_detector_mode(std::string_view text) {
  if (text == "both") return DetectorMode::kBoth;
  if (text == "jump" || text == "jump-only") return DetectorMode::kJumpOnly;
  if (text == "variance" || text == "variance-only") return DetectorMode::kVarianceOnly;
  throw ConfigError("unknown detector mode '" + std::string(text) +
                    "' (expected both, jump or variance)");
}

std::string_view to_string(DetectorMode mode) {
  switch (mode) {
    case DetectorMode::kBoth: return "both";
    case DetectorMode::kJumpOnly: return "jump-only";
    case DetectorMode::kVarianceOnly: return "variance-only";
  }
  return "both";
}

void DetectorConfig::validate() const {
  if (!(gamma_up > 1.0) || !std::isfinite(gamma_up)) {
    throw ConfigError("detector: gamma_up must be > 1");
  }
  if (!(gamma_down > 0.0 && gamma_down < 1.0)) {
    throw ConfigError("detector: gamma_down must lie in (0, 1)");
  }
  if (window_p < 1) throw ConfigError("detector: window_p must be >= 1");
  if (!(tau_j0 > 0.0) || !(tau_v0 > 0.0) || !std::isfinite(tau_j0) || !std::isfinite(tau_v0)) {
    throw ConfigError("detector: initial thresholds must be positive and finite");
  }
}

double compute_jump(double d_n, double d_np1) {
  return guarded_ratio(d_np1 - d_n, d_n, 0.0);
}

double sample_variance(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(n - 1);
}

double compute_variance_ratio(std::span<const double> window, double d_np1) {
  if (window.size() < 2) throw ConfigError("compute_variance_ratio: window needs >= 2 values");
  std::vector<double> shifted(window.begin() + 1, window.end());
  shifted.push_back(d_np1);
  return guarded_ratio(sample_variance(shifted), sample_variance(window), 1.0);
}

Detector::Detector(DetectorConfig config)
    : config_(config), window_(config.window_p + 1) {
  config_.validate();
  reset();
}

void Detector::reset() {
  tau_ = {config_.tau_j0, config_.tau_v0};
  window_.clear();
}

DetectorVerdict Detector::detect_step(double d_np1) {
  DetectorVerdict verdict;
  verdict.thresholds_before = tau_;
  verdict.thresholds_after = tau_;

  if (!std::isfinite(d_np1)) {
    verdict.flagged = true;
    verdict.non_finite = true;
    return verdict;
  }
  if (!window_.full()) {
    verdict.warmup = true;
    (void)window_.push(d_np1);
    return verdict;
  }

  const std::vector<double> old = window_.snapshot();
  const double j = compute_jump(old.back(), d_np1);
  const double v = compute_variance_ratio(old, d_np1);
  verdict.j_value = j;
  verdict.v_value = v;

  const bool j_over = j > tau_.jump;
  const bool v_over = v > tau_.variance;
  switch (config_.mode) {
    case DetectorMode::kBoth: verdict.flagged = j_over && v_over; break;
    case DetectorMode::kJumpOnly: verdict.flagged = j_over; break;
    case DetectorMode::kVarianceOnly: verdict.flagged = v_over; break;
  }

  if (!verdict.flagged || config_.adapt_on_flag) {
    // An infinite indicator leaves its threshold finite: it counts as exceeded.
    tau_.jump *= j_over ? config_.gamma_up : config_.gamma_down;
    tau_.variance *= v_over ? config_.gamma_up : config_.gamma_down;
  }
  verdict.thresholds_after = tau_;
  (void)window_.push(d_np1);
  return verdict;
}

}  // namespace abcheck
