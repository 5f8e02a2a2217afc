#pragma once

// Trial execution, ensembles, detection statistics and the detector
// ablation.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abcheck/config.hpp"
#include "abcheck/core.hpp"
#include "abcheck/detector.hpp"
#include "abcheck/faults.hpp"
#include "abcheck/kernel_regression.hpp"

namespace abcheck {

/// Fault-free trajectory: outputs[k - 1] is step k.
struct CleanRun {
  std::vector<StepOutput> outputs;
};

[[nodiscard]] CleanRun run_clean(const StepperFactory& factory);

/// One row of a per-step trace.
struct StepTrace {
  std::size_t step = 0;
  bool checked = false;
  double difference = 0.0;
  DetectorVerdict verdict;
};

/// Fault-free run with the detector attached.
[[nodiscard]] std::vector<StepTrace> trace_clean(const ExperimentConfig& config);

/// kDiverged: the base state became non-finite; the trial stops after that
/// step and keeps its statistics up to it. kSolverFailure trials are
/// excluded from every rate.
enum class TrialStatus { kCompleted, kDiverged, kSolverFailure };

struct TrialOptions {
  Norm norm = Norm::kInfinity;
  DetectorConfig detector;
  std::optional<FaultSpec> fault;
  std::uint64_t seed = 0;
  std::size_t trial_id = 0;
  /// Shared shadow run; computed on demand when null and a fault is set.
  const CleanRun* clean = nullptr;
  bool keep_trace = false;
};

struct TrialRecord {
  std::size_t trial_id = 0;
  std::uint64_t seed = 0;
  TrialStatus status = TrialStatus::kCompleted;
  std::string failure;
  std::optional<ResolvedFault> fault;
  std::size_t injections = 0;
  std::optional<LteNormalizedError> lte;
  std::vector<std::size_t> flagged_steps;
  bool detected_at_fault = false;
  bool detected_at_fault_or_next = false;
  std::size_t false_positives = 0;
  /// Post-warm-up steps outside {fault, fault + 1}.
  std::size_t checked_steps = 0;
  std::size_t step_count = 0;
  double wall_time = 0.0;
  std::vector<StepTrace> trace;
};

[[nodiscard]] TrialRecord run_trial(const StepperFactory& factory, const TrialOptions& options);

/// Trial counts per impact bin [0, 1), [1, 3), [3, inf]; the infinite
/// sentinel lands in the top bin.
struct BinnedTpr {
  static constexpr std::array<double, 3> kLowerEdges{0.0, 1.0, 3.0};
  std::array<std::size_t, 3> detected{};
  std::array<std::size_t, 3> total{};

  [[nodiscard]] std::optional<double> rate(std::size_t bin) const;
  /// Non-decreasing over the bins that hold at least one trial.
  [[nodiscard]] bool non_decreasing() const;
};

struct ExperimentSummary {
  std::string config_json;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> records;
  std::size_t completed = 0;
  std::size_t diverged = 0;
  std::size_t aborted = 0;
  std::size_t faulted = 0;
  std::size_t infinite_lte = 0;
  std::optional<double> tpr_at_fault;
  std::optional<double> tpr_fault_or_next;
  std::size_t false_positive_total = 0;
  std::size_t checked_total = 0;
  std::optional<double> fpr;
  BinnedTpr binned_at_fault;
  BinnedTpr binned_fault_or_next;
  double bandwidth = 0.0;
  std::vector<CurveSample> curve_at_fault;
  std::vector<CurveSample> curve_fault_or_next;
};

/// Pooled statistics, bins and curves from a set of records.
[[nodiscard]] ExperimentSummary summarize(std::vector<TrialRecord> records,
                                          const ExperimentConfig& config);

[[nodiscard]] ExperimentSummary run_experiment(const ExperimentConfig& config);

/// Three summaries (both, jump-only, variance-only) over identical faults.
[[nodiscard]] std::array<ExperimentSummary, 3> run_ablation(const ExperimentConfig& config);

/// TPR over faulted trials (completed or diverged) with L > l_min; absent
/// when there are none.
[[nodiscard]] std::optional<double> tpr_above(const std::vector<TrialRecord>& records,
                                              double l_min, bool fault_or_next);

[[nodiscard]] std::string_view to_string(TrialStatus status);

}  // namespace abcheck
