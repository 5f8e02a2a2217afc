#pragma once

// Experiment configuration: problem, scheme, norm, detector, fault and
// ensemble settings, JSON (de)serialization and the named presets.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abcheck/core.hpp"
#include "abcheck/detector.hpp"
#include "abcheck/faults.hpp"

namespace abcheck {

/// Problem ids: vdp-b2, vdp-b3, heat-cfg1, heat-cfg2, heat-cfg3, ns-re2000,
/// ns-re20, exponential, stiff. Unset overrides take the preset value.
struct ProblemConfig {
  std::string id = "vdp-b2";
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<double> b;             // van der Pol damping
  std::optional<double> re;            // Reynolds number
  std::optional<std::size_t> grid;     // cavity cells per direction
  std::optional<bool> upwind_blend;    // cavity advection
};

struct EnsembleSettings {
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::optional<double> bandwidth;
  std::size_t grid_points = 100;
};

struct ExperimentConfig {
  ProblemConfig problem;
  std::string scheme;
  Norm norm = Norm::kInfinity;
  DetectorConfig detector;
  bool fault_enabled = true;
  FaultSpec fault;
  EnsembleSettings experiment;

  /// Throws ConfigError on unknown ids, an unsupported problem/scheme
  /// combination or invalid detector/fault parameters.
  void validate() const;
  [[nodiscard]] double dt() const;
  /// Compact JSON with sorted keys; parses back to an equal configuration.
  [[nodiscard]] std::string to_json() const;

  /// Starts from the preset for problem.id (and scheme, if given) and
  /// applies every key present in the document.
  [[nodiscard]] static ExperimentConfig from_json(std::string_view text);
  [[nodiscard]] static ExperimentConfig load(const std::filesystem::path& path);
};

[[nodiscard]] const std::vector<std::string>& problem_ids();
[[nodiscard]] bool is_heat_problem(std::string_view id);
[[nodiscard]] bool is_ns_problem(std::string_view id);
[[nodiscard]] bool is_vdp_problem(std::string_view id);

[[nodiscard]] std::string default_scheme(std::string_view problem_id);
[[nodiscard]] double default_dt(std::string_view problem_id, std::string_view scheme);
[[nodiscard]] FaultMode default_fault_mode(std::string_view problem_id);
[[nodiscard]] double default_sigma2(std::string_view problem_id, std::string_view scheme,
                                    FaultMode mode);

/// Fully populated configuration for a problem and scheme ("" picks the
/// problem's default scheme).
[[nodiscard]] ExperimentConfig preset(std::string_view problem_id, std::string_view scheme = "");

using StepperFactory = std::function<std::unique_ptr<PairStepper>()>;

/// Each call builds a fresh stepper at t = 0.
[[nodiscard]] StepperFactory make_stepper_factory(const ExperimentConfig& config);

}  // namespace abcheck
