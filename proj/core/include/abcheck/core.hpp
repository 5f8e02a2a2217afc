#pragma once

// Shared domain types for base/auxiliary (A/B) time stepping: solution
// states, time grids, difference norms, the sliding difference window and
// the stepper contract every solver module implements.

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace abcheck {

/// Hard solver failure (non-convergence, zero pivot). Distinct from a
/// detector flag: it is never counted as a true or false positive.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or contract violation by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Norm { kInfinity, kOne, kTwo };

[[nodiscard]] Norm parse_norm(std::string_view text);
[[nodiscard]] std::string_view to_string(Norm norm);

struct FieldShape {
  std::size_t rows = 0;
  std::size_t cols = 1;

  [[nodiscard]] constexpr std::size_t size() const { return rows * cols; }
  friend constexpr bool operator==(const FieldShape&, const FieldShape&) = default;
};

/// A solution snapshot: a flat vector of reals partitioned into one or more
/// fields (one for ODEs and 1-D PDEs, two for the Navier-Stokes velocities).
/// Two-dimensional fields are stored column-major (row index fastest).
class State {
 public:
  State() = default;
  explicit State(std::vector<double> values);
  State(std::vector<double> values, std::vector<FieldShape> fields);

  [[nodiscard]] static State zeros(std::size_t n);
  [[nodiscard]] static State zeros_like(const State& other);

  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }
  [[nodiscard]] std::span<double> values() { return values_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double& operator[](std::size_t i) { return values_[i]; }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

  [[nodiscard]] const std::vector<FieldShape>& fields() const { return fields_; }
  [[nodiscard]] std::size_t field_count() const { return fields_.size(); }
  [[nodiscard]] std::span<double> field(std::size_t i);
  [[nodiscard]] std::span<const double> field(std::size_t i) const;

  [[nodiscard]] bool same_layout(const State& other) const;
  [[nodiscard]] bool all_finite() const;

  friend bool operator==(const State&, const State&) = default;

 private:
  std::vector<double> values_;
  std::vector<FieldShape> fields_;
};

/// Fixed-step time grid: t_n = t0 + n * dt for n = 0 .. n_steps.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t n_steps = 0;

  [[nodiscard]] double t(std::size_t n) const { return t0 + static_cast<double>(n) * dt; }
  [[nodiscard]] double t_end() const { return t(n_steps); }

  /// Grid covering [t0, t_end]; (t_end - t0) / dt must be an integer.
  [[nodiscard]] static TimeGrid covering(double t0, double t_end, double dt);
};

/// Result of one combined base + auxiliary advance. Step k maps t_{k-1} to
/// t_k. An unchecked step (start-up, bootstrap) carries no auxiliary.
struct StepOutput {
  State base;
  State auxiliary;
  std::size_t step_index = 0;

  [[nodiscard]] bool checked() const { return !auxiliary.empty(); }
};

/// ||base - aux|| in the selected norm. Multi-field states take the max of
/// the per-field norms. Throws ConfigError on a layout mismatch.
[[nodiscard]] double difference_norm(const State& base, const State& aux,
                                     Norm norm = Norm::kInfinity);

[[nodiscard]] double vector_norm(std::span<const double> v, Norm norm = Norm::kInfinity);

enum class PushStatus { kStored, kRejectedNonFinite };

/// Sliding FIFO of the most recent difference values D_i, oldest first.
class DifferenceWindow {
 public:
  explicit DifferenceWindow(std::size_t capacity);

  /// Non-finite values are not stored; a non-finite value is the caller's
  /// signal to flag immediately. Negative values throw.
  [[nodiscard]] PushStatus push(double d);
  void clear() { values_.clear(); }

  [[nodiscard]] std::size_t capacity() const { return capacity_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool full() const { return values_.size() == capacity_; }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] double newest() const { return values_.back(); }
  [[nodiscard]] std::vector<double> snapshot() const;

 private:
  std::size_t capacity_;
  std::deque<double> values_;
};

enum class FaultMode { kDerivativeEval, kLinearRhs, kPreviousSolution };

[[nodiscard]] FaultMode parse_fault_mode(std::string_view text);
[[nodiscard]] std::string_view to_string(FaultMode mode);

/// Instrumentation sites exposed by every stepper. The default
/// implementation does nothing; the fault injector overrides these. `step`
/// is always the index of the step whose base output first consumes the
/// value passed in.
class FaultHook {
 public:
  virtual ~FaultHook() = default;

  /// A freshly computed derivative (ODE stage, heat source term).
  virtual void on_derivative(std::size_t step, std::size_t slot, std::span<double> value);
  /// Right-hand side of the base scheme's linear solve, before the solve.
  virtual void on_linear_rhs(std::size_t step, std::span<double> rhs);
  /// Stored data from earlier steps that this step reads (previous solution,
  /// stored derivative history). Entries are modified in place and persist.
  virtual void on_stored_data(std::size_t step, std::span<const std::span<double>> entries);
};

/// Shape of the corruption targets a stepper offers for one fault mode.
struct FaultTargets {
  std::size_t slots = 0;       // RK stages, history entries, or 1
  std::size_t components = 0;  // length of each slot vector
};

/// A base/auxiliary scheme pair bound to one problem instance, owning its
/// per-trial trajectory state. Stepping is strictly sequential.
class PairStepper {
 public:
  virtual ~PairStepper() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual std::size_t step_count() const = 0;
  /// First step index that produces an auxiliary value.
  [[nodiscard]] virtual std::size_t first_checked_step() const = 0;
  [[nodiscard]] virtual std::size_t steps_taken() const = 0;
  /// Base solution at the most recent step (the initial state before any).
  [[nodiscard]] virtual const State& current() const = 0;
  /// Advance one step. `hook` may be null.
  virtual StepOutput step(FaultHook* hook) = 0;
  [[nodiscard]] virtual std::optional<FaultTargets> fault_targets(FaultMode mode) const = 0;

  /// With the auxiliary disabled, steps return no auxiliary. The base
  /// trajectory must be bit-identical either way.
  void set_auxiliary_enabled(bool enabled) { auxiliary_enabled_ = enabled; }
  [[nodiscard]] bool auxiliary_enabled() const { return auxiliary_enabled_; }

 private:
  bool auxiliary_enabled_ = true;
};

namespace detail {
// out = a + s * b
void axpy_into(std::span<double> out, std::span<const double> a, double s,
               std::span<const double> b);
}  // namespace detail

}  // namespace abcheck
