#include "abcheck/faults.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "abcheck/rng.hpp"

namespace abcheck {

void FaultSpec::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ConfigError("fault: sigma2 must be positive and finite");
  }
  if (factor && !std::isfinite(*factor)) throw ConfigError("fault: factor must be finite");
}

ResolvedFault resolve_fault(const FaultSpec& spec, const PairStepper& stepper, std::size_t warmup,
                            std::uint64_t seed) {
  spec.validate();
  const auto targets = stepper.fault_targets(spec.mode);
  if (!targets || targets->slots == 0 || targets->components == 0) {
    throw ConfigError("scheme " + stepper.name() + " has no injection site for mode " +
                      std::string(to_string(spec.mode)));
  }

  const std::size_t n = stepper.step_count();
  const std::size_t first = stepper.first_checked_step();
  CounterRng rng(seed);
  ResolvedFault f;
  f.mode = spec.mode;
  f.sigma2 = spec.sigma2;
  f.seed = seed;

  if (spec.step) {
    if (*spec.step < first || *spec.step > n) {
      throw ConfigError("fault step " + std::to_string(*spec.step) + " outside checked range [" +
                        std::to_string(first) + ", " + std::to_string(n) + "]");
    }
    f.step = *spec.step;
  } else {
    const std::size_t lo = first + warmup;
    if (n < 1 || lo > n - 1) {
      throw ConfigError("no eligible fault steps: horizon too short for the detector warm-up");
    }
    f.step = lo + rng.uniform_index(n - lo);
  }

  if (spec.slot) {
    if (*spec.slot >= targets->slots) throw ConfigError("fault slot out of range");
    f.slot = *spec.slot;
  } else {
    f.slot = rng.uniform_index(targets->slots);
  }

  if (spec.component) {
    if (*spec.component >= targets->components) {
      throw ConfigError("fault component " + std::to_string(*spec.component) +
                        " out of range (size " + std::to_string(targets->components) + ")");
    }
    f.component = *spec.component;
  } else {
    f.component = rng.uniform_index(targets->components);
  }

  f.factor = spec.factor ? *spec.factor : rng.normal(1.0, spec.sigma2);
  return f;
}

void corrupt(std::span<double> values, std::size_t component, double factor) {
  if (component >= values.size()) throw ConfigError("corrupt: component out of range");
  values[component] *= factor;
}

void FaultInjector::apply(std::span<double> values) {
  original_ = values[fault_.component];
  corrupt(values, fault_.component, fault_.factor);
  corrupted_ = values[fault_.component];
  ++injections_;
}

void FaultInjector::on_derivative(std::size_t step, std::size_t slot, std::span<double> value) {
  if (injections_ == 0 && fault_.mode == FaultMode::kDerivativeEval && step == fault_.step &&
      slot == fault_.slot) {
    apply(value);
  }
}

void FaultInjector::on_linear_rhs(std::size_t step, std::span<double> rhs) {
  if (injections_ == 0 && fault_.mode == FaultMode::kLinearRhs && step == fault_.step) {
    apply(rhs);
  }
}

void FaultInjector::on_stored_data(std::size_t step, std::span<const std::span<double>> entries) {
  if (injections_ == 0 && fault_.mode == FaultMode::kPreviousSolution && step == fault_.step &&
      fault_.slot < entries.size()) {
    apply(entries[fault_.slot]);
  }
}

InstrumentedPair::InstrumentedPair(std::unique_ptr<PairStepper> inner,
                                   std::optional<ResolvedFault> fault)
    : inner_(std::move(inner)) {
  if (!inner_) throw ConfigError("wrap_with_fault: null stepper");
  if (fault) injector_.emplace(*fault);
}

StepOutput InstrumentedPair::step(FaultHook*) {
  inner_->set_auxiliary_enabled(auxiliary_enabled());
  return inner_->step(injector_ ? &*injector_ : nullptr);
}

std::unique_ptr<InstrumentedPair> wrap_with_fault(std::unique_ptr<PairStepper> stepper,
                                                  std::optional<ResolvedFault> fault) {
  return std::make_unique<InstrumentedPair>(std::move(stepper), fault);
}

bool LteNormalizedError::infinite() const { return std::isinf(value); }

LteNormalizedError lte_normalized_error(const State& faulty_base, const State& clean_base,
                                        const State& clean_aux, Norm norm) {
  LteNormalizedError e;
  e.numerator = difference_norm(faulty_base, clean_base, norm);
  e.denominator = difference_norm(clean_base, clean_aux, norm);
  if (e.denominator > 0.0) {
    e.value = e.numerator / e.denominator;
  } else {
    e.value = e.numerator > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return e;
}

}  // namespace abcheck
