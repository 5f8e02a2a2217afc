#include "abcheck/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace abcheck {

Norm parse_norm(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "max") return Norm::kInfinity;
  if (text == "1" || text == "one" || text == "l1") return Norm::kOne;
  if (text == "2" || text == "two" || text == "l2") return Norm::kTwo;
  throw ConfigError("unknown norm '" + std::string(text) + "' (expected inf, one or two)");
}

std::string_view to_string(Norm norm) {
  switch (norm) {
    case Norm::kInfinity: return "inf";
    case Norm::kOne: return "one";
    case Norm::kTwo: return "two";
  }
  return "inf";
}

State::State(std::vector<double> values)
    : values_(std::move(values)), fields_{FieldShape{values_.size(), 1}} {}

State::State(std::vector<double> values, std::vector<FieldShape> fields)
    : values_(std::move(values)), fields_(std::move(fields)) {
  const std::size_t total = std::accumulate(
      fields_.begin(), fields_.end(), std::size_t{0},
      [](std::size_t acc, const FieldShape& f) { return acc + f.size(); });
  if (total != values_.size()) {
    throw ConfigError("State: field shapes cover " + std::to_string(total) +
                      " values but " + std::to_string(values_.size()) + " were given");
  }
}

State State::zeros(std::size_t n) { return State(std::vector<double>(n, 0.0)); }

State State::zeros_like(const State& other) {
  return State(std::vector<double>(other.size(), 0.0), other.fields_);
}

std::span<double> State::field(std::size_t i) {
  std::size_t offset = 0;
  for (std::size_t f = 0; f < i; ++f) offset += fields_.at(f).size();
  return std::span<double>(values_).subspan(offset, fields_.at(i).size());
}

std::span<const double> State::field(std::size_t i) const {
  std::size_t offset = 0;
  for (std::size_t f = 0; f < i; ++f) offset += fields_.at(f).size();
  return std::span<const double>(values_).subspan(offset, fields_.at(i).size());
}

bool State::same_layout(const State& other) const {
  return values_.size() == other.values_.size() && fields_ == other.fields_;
}

bool State::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

TimeGrid TimeGrid::covering(double t0, double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("TimeGrid: dt must be positive");
  if (!(t_end > t0)) throw ConfigError("TimeGrid: t_end must exceed t0");
  const double ratio = (t_end - t0) / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("TimeGrid: horizon is not an integer number of steps");
  }
  return TimeGrid{t0, dt, static_cast<std::size_t>(n)};
}

double vector_norm(std::span<const double> v, Norm norm) {
  switch (norm) {
    case Norm::kInfinity: {
      double m = 0.0;
      for (double x : v) m = std::max(m, std::abs(x));
      return m;
    }
    case Norm::kOne: {
      double s = 0.0;
      for (double x : v) s += std::abs(x);
      return s;
    }
    case Norm::kTwo: {
      double s = 0.0;
      for (double x : v) s += x * x;
      return std::sqrt(s);
    }
  }
  return 0.0;
}

double difference_norm(const State& base, const State& aux, Norm norm) {
  if (!base.same_layout(aux)) {
    throw ConfigError("difference_norm: base and auxiliary states differ in layout");
  }
  double result = 0.0;
  std::vector<double> diff;
  for (std::size_t f = 0; f < base.field_count(); ++f) {
    const auto b = base.field(f);
    const auto a = aux.field(f);
    diff.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) diff[i] = b[i] - a[i];
    result = std::max(result, vector_norm(diff, norm));
  }
  return result;
}

DifferenceWindow::DifferenceWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("DifferenceWindow: capacity must be positive");
}

PushStatus DifferenceWindow::push(double d) {
  if (!std::isfinite(d)) return PushStatus::kRejectedNonFinite;
  if (d < 0.0) throw std::invalid_argument("DifferenceWindow: differences are non-negative");
  if (values_.size() == capacity_) values_.pop_front();
  values_.push_back(d);
  return PushStatus::kStored;
}

std::vector<double> DifferenceWindow::snapshot() const {
  return {values_.begin(), values_.end()};
}

FaultMode parse_fault_mode(std::string_view text) {
  if (text == "derivative-eval") return FaultMode::kDerivativeEval;
  if (text == "linear-rhs") return FaultMode::kLinearRhs;
  if (text == "previous-solution") return FaultMode::kPreviousSolution;
  throw ConfigError("unknown fault mode '" + std::string(text) +
                    "' (expected derivative-eval, linear-rhs or previous-solution)");
}

std::string_view to_string(FaultMode mode) {
  switch (mode) {
    case FaultMode::kDerivativeEval: return "derivative-eval";
    case FaultMode::kLinearRhs: return "linear-rhs";
    case FaultMode::kPreviousSolution: return "previous-solution";
  }
  return "derivative-eval";
}

void FaultHook::on_derivative(std::size_t, std::size_t, std::span<double>) {}
void FaultHook::on_linear_rhs(std::size_t, std::span<double>) {}
void FaultHook::on_stored_data(std::size_t, std::span<const std::span<double>>) {}

namespace detail {
void axpy_into(std::span<double> out, std::span<const double> a, double s,
               std::span<const double> b) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + s * b[i];
}
}  // namespace detail

}  // namespace abcheck
