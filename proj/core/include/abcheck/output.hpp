#pragma once

// CSV writers for experiment results.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "abcheck/harness.hpp"

namespace abcheck {

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

void write_trials_csv(std::ostream& out, const ExperimentSummary& summary);
void write_summary_csv(std::ostream& out, const ExperimentSummary& summary);
void write_curve_csv(std::ostream& out, const std::vector<CurveSample>& curve,
                     const std::string& config_json);
/// Per-trial wall time, kept apart so the other files stay byte-stable.
void write_timing_csv(std::ostream& out, const ExperimentSummary& summary);

struct OutputPaths {
  std::filesystem::path trials;
  std::filesystem::path summary;
  std::filesystem::path curve_at_fault;
  std::filesystem::path curve_fault_or_next;
  std::filesystem::path timing;
};

/// Writes trials.csv, summary.csv, curve_at_fault.csv,
/// curve_fault_or_next.csv and timing.csv into `dir` (created if missing),
/// with file names prefixed by `prefix`. Throws std::runtime_error naming
/// the path on I/O failure.
OutputPaths emit_outputs(const ExperimentSummary& summary, const std::filesystem::path& dir,
                         const std::string& prefix = "");

}  // namespace abcheck
