#pragma once

// Single-shot multiplicative fault injection and the LTE-normalized error.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "abcheck/core.hpp"

namespace abcheck {

/// Unset fields are drawn per trial. Draw order: step, slot, component,
/// factor.
struct FaultSpec {
  FaultMode mode = FaultMode::kDerivativeEval;
  double sigma2 = 0.1;
  std::optional<std::size_t> step;
  std::optional<std::size_t> slot;
  std::optional<std::size_t> component;
  /// Explicit multiplier; replaces the Normal(1, sigma2) draw.
  std::optional<double> factor;

  /// Throws ConfigError unless sigma2 > 0 and any explicit factor is finite.
  void validate() const;
};

/// A fault with every choice made.
struct ResolvedFault {
  FaultMode mode = FaultMode::kDerivativeEval;
  std::size_t step = 0;
  std::size_t slot = 0;
  std::size_t component = 0;
  double factor = 1.0;
  double sigma2 = 0.0;
  std::uint64_t seed = 0;
};

/// Resolves `spec` against the stepper's fault targets. Random steps are
/// drawn from [first_checked + warmup, N - 1]; explicit steps must lie in
/// [first_checked, N]. Throws ConfigError when the stepper has no site for
/// the mode or a choice is out of range.
[[nodiscard]] ResolvedFault resolve_fault(const FaultSpec& spec, const PairStepper& stepper,
                                          std::size_t warmup, std::uint64_t seed);

/// Multiplies values[component] by factor.
void corrupt(std::span<double> values, std::size_t component, double factor);

/// FaultHook that applies one resolved fault the first time its site is
/// reached and ignores every later call.
class FaultInjector final : public FaultHook {
 public:
  explicit FaultInjector(ResolvedFault fault) : fault_(fault) {}

  void on_derivative(std::size_t step, std::size_t slot, std::span<double> value) override;
  void on_linear_rhs(std::size_t step, std::span<double> rhs) override;
  void on_stored_data(std::size_t step, std::span<const std::span<double>> entries) override;

  [[nodiscard]] const ResolvedFault& fault() const { return fault_; }
  [[nodiscard]] std::size_t injections() const { return injections_; }
  /// Value of the targeted component before and after corruption.
  [[nodiscard]] double original_value() const { return original_; }
  [[nodiscard]] double corrupted_value() const { return corrupted_; }

 private:
  void apply(std::span<double> values);

  ResolvedFault fault_;
  std::size_t injections_ = 0;
  double original_ = 0.0;
  double corrupted_ = 0.0;
};

/// Stepper decorator that routes every step through an injector. With the
/// injector absent the wrapped stepper runs untouched.
class InstrumentedPair final : public PairStepper {
 public:
  InstrumentedPair(std::unique_ptr<PairStepper> inner, std::optional<ResolvedFault> fault);

  [[nodiscard]] std::string name() const override { return inner_->name(); }
  [[nodiscard]] std::size_t step_count() const override { return inner_->step_count(); }
  [[nodiscard]] std::size_t first_checked_step() const override {
    return inner_->first_checked_step();
  }
  [[nodiscard]] std::size_t steps_taken() const override { return inner_->steps_taken(); }
  [[nodiscard]] const State& current() const override { return inner_->current(); }
  /// The `hook` argument is ignored in favour of the owned injector.
  StepOutput step(FaultHook* hook) override;
  [[nodiscard]] std::optional<FaultTargets> fault_targets(FaultMode mode) const override {
    return inner_->fault_targets(mode);
  }

  [[nodiscard]] const FaultInjector* injector() const {
    return injector_ ? &*injector_ : nullptr;
  }

 private:
  std::unique_ptr<PairStepper> inner_;
  std::optional<FaultInjector> injector_;
};

[[nodiscard]] std::unique_ptr<InstrumentedPair> wrap_with_fault(
    std::unique_ptr<PairStepper> stepper, std::optional<ResolvedFault> fault);

struct LteNormalizedError {
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  std::size_t step = 0;

  /// True for the +inf sentinel (zero LTE estimate with a non-zero impact).
  [[nodiscard]] bool infinite() const;
};

/// ||B - B_clean|| / ||B_clean - A_clean||. A zero denominator gives +inf,
/// or 0 when the numerator is zero too.
[[nodiscard]] LteNormalizedError lte_normalized_error(const State& faulty_base,
                                                      const State& clean_base,
                                                      const State& clean_aux,
                                                      Norm norm = Norm::kInfinity);

}  // namespace abcheck
