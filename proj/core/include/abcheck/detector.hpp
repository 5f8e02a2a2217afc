#pragma once

// Two-indicator error detector over the difference sequence D_n with
// closed-loop threshold adaptation.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "abcheck/core.hpp"

namespace abcheck {

/// Denominators below this are treated as zero.
inline constexpr double kZeroGuard = 1e-300;

enum class DetectorMode { kBoth, kJumpOnly, kVarianceOnly };

[[nodiscard]] DetectorMode parse_detector_mode(std::string_view text);
[[nodiscard]] std::string_view to_string(DetectorMode mode);

struct DetectorConfig {
  double gamma_up = 1.4;
  double gamma_down = 0.95;
  std::size_t window_p = 10;
  double tau_j0 = 1.0;
  double tau_v0 = 1.0;
  DetectorMode mode = DetectorMode::kBoth;
  /// Also apply the threshold update on flagged steps. Off: thresholds hold
  /// their values across a flag, which lets a smooth growth phase flag on
  /// every step.
  bool adapt_on_flag = true;

  /// Throws ConfigError unless gamma_up > 1 > gamma_down > 0, p >= 1 and
  /// both initial thresholds are positive and finite.
  void validate() const;
};

struct Thresholds {
  double jump = 0.0;
  double variance = 0.0;
};

struct DetectorVerdict {
  bool flagged = false;
  bool warmup = false;
  bool non_finite = false;
  std::optional<double> j_value;
  std::optional<double> v_value;
  Thresholds thresholds_before;
  Thresholds thresholds_after;
};

/// (d_np1 - d_n) / d_n; 0 when both are below the zero guard, +inf when only
/// d_n is.
[[nodiscard]] double compute_jump(double d_n, double d_np1);

/// Sample variance of (window[1..], d_np1) over sample variance of window.
/// 1 when both variances are below the zero guard, +inf when only the old
/// one is. `window` needs at least two entries.
[[nodiscard]] double compute_variance_ratio(std::span<const double> window, double d_np1);

/// Sample variance with the (count - 1) divisor.
[[nodiscard]] double sample_variance(std::span<const double> values);

class Detector {
 public:
  explicit Detector(DetectorConfig config = {});

  /// Feed D_{n+1}. Non-finite values flag at once and are not stored.
  DetectorVerdict detect_step(double d_np1);
  void reset();

  [[nodiscard]] const DetectorConfig& config() const { return config_; }
  [[nodiscard]] Thresholds thresholds() const { return tau_; }
  [[nodiscard]] bool warming_up() const { return !window_.full(); }
  [[nodiscard]] const DifferenceWindow& window() const { return window_; }

 private:
  DetectorConfig config_;
  Thresholds tau_;
  DifferenceWindow window_;
};

}  // namespace abcheck
