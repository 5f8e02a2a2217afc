#include "abcheck/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace abcheck {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::size_t bin_of(double l) {
  std::size_t bin = 0;
  for (std::size_t i = 0; i < BinnedTpr::kLowerEdges.size(); ++i) {
    if (l >= BinnedTpr::kLowerEdges[i]) bin = i;
  }
  return bin;
}

bool counted(const TrialRecord& r) { return r.status != TrialStatus::kSolverFailure; }

bool faulted(const TrialRecord& r) {
  return counted(r) && r.fault && r.lte && r.injections == 1;
}

std::vector<CurveSample> curve(const std::vector<TrialRecord>& records, bool fault_or_next,
                               double bandwidth, const std::vector<double>& grid) {
  std::vector<RegressionPoint> points;
  for (const auto& r : records) {
    if (!faulted(r) || r.lte->infinite()) continue;
    const bool hit = fault_or_next ? r.detected_at_fault_or_next : r.detected_at_fault;
    points.push_back({r.lte->value, hit ? 1.0 : 0.0});
  }
  if (points.empty() || grid.empty()) return {};
  return kernel_regression(points, bandwidth, grid);
}

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs body(i) for i in [0, n) on a pool; rethrows the first exception.
template <typename Body>
void parallel_for(std::size_t n, std::size_t threads, Body body) {
  const std::size_t workers = worker_count(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

TrialOptions options_for(const ExperimentConfig& config, std::size_t trial,
                         const CleanRun* clean) {
  TrialOptions o;
  o.norm = config.norm;
  o.detector = config.detector;
  if (config.fault_enabled) o.fault = config.fault;
  o.seed = config.experiment.seed + trial;
  o.trial_id = trial;
  o.clean = clean;
  return o;
}

}  // namespace

std::string_view to_string(TrialStatus status) {
  switch (status) {
    case TrialStatus::kCompleted: return "completed";
    case TrialStatus::kDiverged: return "diverged";
    case TrialStatus::kSolverFailure: return "solver-failure";
  }
  return "completed";
}

CleanRun run_clean(const StepperFactory& factory) {
  auto stepper = factory();
  CleanRun run;
  run.outputs.reserve(stepper->step_count());
  while (stepper->steps_taken() < stepper->step_count()) {
    run.outputs.push_back(stepper->step(nullptr));
  }
  return run;
}

std::vector<StepTrace> trace_clean(const ExperimentConfig& config) {
  TrialOptions o = options_for(config, 0, nullptr);
  o.fault.reset();
  o.keep_trace = true;
  return run_trial(make_stepper_factory(config), o).trace;
}

TrialRecord run_trial(const StepperFactory& factory, const TrialOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.trial_id = options.trial_id;
  rec.seed = options.seed;

  auto inner = factory();
  rec.step_count = inner->step_count();
  const std::size_t warmup = options.detector.window_p + 1;
  if (options.fault) rec.fault = resolve_fault(*options.fault, *inner, warmup, options.seed);

  CleanRun local;
  const CleanRun* clean = options.clean;
  if (rec.fault && clean == nullptr) {
    local = run_clean(factory);
    clean = &local;
  }
  if (clean != nullptr && rec.fault && clean->outputs.size() < rec.fault->step) {
    throw ConfigError("run_trial: shadow run shorter than the fault step");
  }

  auto stepper = wrap_with_fault(std::move(inner), rec.fault);
  Detector detector(options.detector);
  const std::size_t fault_step = rec.fault ? rec.fault->step : 0;
  auto near_fault = [&](std::size_t k) {
    return rec.fault && (k == fault_step || k == fault_step + 1);
  };

  try {
    for (std::size_t k = 1; k <= rec.step_count; ++k) {
      StepOutput out = stepper->step(nullptr);
      if (rec.fault && k == fault_step) {
        const StepOutput& ref = clean->outputs[k - 1];
        rec.lte = lte_normalized_error(out.base, ref.base, ref.auxiliary, options.norm);
        rec.lte->step = k;
      }
      StepTrace row;
      row.step = k;
      row.checked = out.checked();
      if (out.checked()) {
        double d = std::numeric_limits<double>::quiet_NaN();
        if (out.base.all_finite() && out.auxiliary.all_finite()) {
          d = difference_norm(out.base, out.auxiliary, options.norm);
        }
        row.difference = d;
        row.verdict = detector.detect_step(d);
        if (!row.verdict.warmup) {
          if (row.verdict.flagged) rec.flagged_steps.push_back(k);
          if (!near_fault(k)) {
            ++rec.checked_steps;
            if (row.verdict.flagged) ++rec.false_positives;
          }
        }
      }
      if (options.keep_trace) rec.trace.push_back(row);
      if (!out.base.all_finite()) {
        rec.status = TrialStatus::kDiverged;
        break;
      }
    }
  } catch (const SolverFailure& e) {
    rec.status = TrialStatus::kSolverFailure;
    rec.failure = e.what();
  }

  if (const FaultInjector* inj = stepper->injector()) rec.injections = inj->injections();
  for (std::size_t k : rec.flagged_steps) {
    if (rec.fault && k == fault_step) rec.detected_at_fault = true;
    if (near_fault(k)) rec.detected_at_fault_or_next = true;
  }
  rec.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::optional<double> BinnedTpr::rate(std::size_t bin) const {
  return ratio(detected.at(bin), total.at(bin));
}

bool BinnedTpr::non_decreasing() const {
  std::optional<double> last;
  for (std::size_t b = 0; b < total.size(); ++b) {
    const auto r = rate(b);
    if (!r) continue;
    if (last && *r < *last) return false;
    last = r;
  }
  return true;
}

std::optional<double> tpr_above(const std::vector<TrialRecord>& records, double l_min,
                                bool fault_or_next) {
  std::size_t hits = 0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (!faulted(r) || !(r.lte->value > l_min)) continue;
    ++n;
    if (fault_or_next ? r.detected_at_fault_or_next : r.detected_at_fault) ++hits;
  }
  return ratio(hits, n);
}

ExperimentSummary summarize(std::vector<TrialRecord> records, const ExperimentConfig& config) {
  ExperimentSummary s;
  s.config_json = config.to_json();
  s.seed = config.experiment.seed;
  s.records = std::move(records);

  std::size_t hit_fault = 0;
  std::size_t hit_next = 0;
  std::vector<double> finite_l;
  for (const auto& r : s.records) {
    if (!counted(r)) {
      ++s.aborted;
      continue;
    }
    ++(r.status == TrialStatus::kDiverged ? s.diverged : s.completed);
    s.false_positive_total += r.false_positives;
    s.checked_total += r.checked_steps;
    if (!faulted(r)) continue;
    ++s.faulted;
    hit_fault += r.detected_at_fault ? 1 : 0;
    hit_next += r.detected_at_fault_or_next ? 1 : 0;
    const std::size_t bin = bin_of(r.lte->value);
    ++s.binned_at_fault.total[bin];
    ++s.binned_fault_or_next.total[bin];
    s.binned_at_fault.detected[bin] += r.detected_at_fault ? 1 : 0;
    s.binned_fault_or_next.detected[bin] += r.detected_at_fault_or_next ? 1 : 0;
    if (r.lte->infinite()) {
      ++s.infinite_lte;
    } else {
      finite_l.push_back(r.lte->value);
    }
  }
  s.tpr_at_fault = ratio(hit_fault, s.faulted);
  s.tpr_fault_or_next = ratio(hit_next, s.faulted);
  s.fpr = ratio(s.false_positive_total, s.checked_total);

  if (!finite_l.empty()) {
    s.bandwidth = config.experiment.bandwidth ? *config.experiment.bandwidth
                                              : silverman_bandwidth(finite_l);
    const auto [lo, hi] = std::minmax_element(finite_l.begin(), finite_l.end());
    const auto grid =
        log_grid(std::max(1e-2, *lo), std::max(1e-2, *hi), config.experiment.grid_points);
    s.curve_at_fault = curve(s.records, false, s.bandwidth, grid);
    s.curve_fault_or_next = curve(s.records, true, s.bandwidth, grid);
  }
  return s;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const StepperFactory factory = make_stepper_factory(config);
  CleanRun clean;
  if (config.fault_enabled) clean = run_clean(factory);

  std::vector<TrialRecord> records(config.experiment.trials);
  parallel_for(records.size(), config.experiment.threads, [&](std::size_t i) {
    records[i] = run_trial(factory, options_for(config, i, config.fault_enabled ? &clean : nullptr));
  });
  return summarize(std::move(records), config);
}

std::array<ExperimentSummary, 3> run_ablation(const ExperimentConfig& config) {
  config.validate();
  const StepperFactory factory = make_stepper_factory(config);
  CleanRun clean;
  if (config.fault_enabled) clean = run_clean(factory);

  constexpr std::array modes{DetectorMode::kBoth, DetectorMode::kJumpOnly,
                             DetectorMode::kVarianceOnly};
  std::array<ExperimentSummary, 3> out;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    ExperimentConfig c = config;
    c.detector.mode = modes[m];
    std::vector<TrialRecord> records(c.experiment.trials);
    parallel_for(records.size(), c.experiment.threads, [&](std::size_t i) {
      records[i] = run_trial(factory, options_for(c, i, c.fault_enabled ? &clean : nullptr));
    });
    out[m] = summarize(std::move(records), c);
  }
  return out;
}

}  // namespace abcheck
