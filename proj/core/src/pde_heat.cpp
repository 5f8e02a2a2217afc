#include "abcheck/pde_heat.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "abcheck/tridiagonal.hpp"

namespace abcheck::heat {

namespace {

bool is_integer(double value) {
  return std::abs(value - std::round(value)) <= 1e-9 * std::max(1.0, std::abs(value));
}

// Solves (I - alpha * second_difference) x = rhs.
void solve_implicit(double alpha, std::span<const double> rhs, std::span<double> x) {
  const std::size_t m = rhs.size();
  std::vector<double> off(m, -alpha);
  std::vector<double> diag(m, 1.0 + 2.0 * alpha);
  solve_tridiagonal(off, diag, off, rhs, x);
}

}  // namespace

void HeatProblem::validate() const {
  if (!(k > 0.0)) throw ConfigError("heat: diffusivity k must be positive");
  if (!(dx > 0.0) || !is_integer(1.0 / dx) || std::round(1.0 / dx) < 2.0) {
    throw ConfigError("heat: 1/dx must be an integer >= 2");
  }
  if (!(dt > 0.0)) throw ConfigError("heat: dt must be positive");
  if (!q || !v) throw ConfigError("heat: source and initial condition must be set");
  (void)grid();
}

std::size_t HeatProblem::interior_nodes() const {
  return static_cast<std::size_t>(std::round(1.0 / dx)) - 1;
}

State HeatProblem::initial_state() const {
  std::vector<double> u(interior_nodes());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = v(x(j));
  return State(std::move(u));
}

std::vector<double> HeatProblem::sample_source(double t) const {
  std::vector<double> out(interior_nodes());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = q(x(j), t);
  return out;
}

void apply_second_difference(std::span<const double> u, std::span<double> out) {
  const std::size_t m = u.size();
  for (std::size_t j = 0; j < m; ++j) {
    const double left = j > 0 ? u[j - 1] : 0.0;
    const double right = j + 1 < m ? u[j + 1] : 0.0;
    out[j] = left - 2.0 * u[j] + right;
  }
}

StepOutput fe_be_pair_step(const HeatProblem& problem, const State& u_prev,
                           std::span<const double> q_prev, std::span<const double> q_next,
                           std::size_t step, FaultHook* hook, bool with_aux) {
  const std::size_t m = u_prev.size();
  const double r = problem.mesh_ratio();
  const double dt = problem.dt;
  const auto u = u_prev.values();

  StepOutput out;
  out.step_index = step;

  if (with_aux) {
    std::vector<double> lap(m);
    apply_second_difference(u, lap);
    out.auxiliary = State::zeros_like(u_prev);
    for (std::size_t j = 0; j < m; ++j) out.auxiliary[j] = u[j] + r * lap[j] + dt * q_prev[j];
  }

  std::vector<double> rhs(m);
  for (std::size_t j = 0; j < m; ++j) rhs[j] = u[j] + dt * q_next[j];
  if (hook != nullptr) hook->on_linear_rhs(step, rhs);
  out.base = State::zeros_like(u_prev);
  solve_implicit(r, rhs, out.base.values());
  return out;
}

StepOutput fe_be_pair_step(const HeatProblem& problem, const State& u_prev, std::size_t step) {
  const auto q_prev = problem.sample_source(problem.grid().t(step - 1));
  const auto q_next = problem.sample_source(problem.grid().t(step));
  return fe_be_pair_step(problem, u_prev, q_prev, q_next, step);
}

StepOutput richardson_cn_pair_step(const HeatProblem& problem, const State& u_prev,
                                   const State* u_prev2, std::span<const double> q_prev,
                                   std::span<const double> q_next, std::size_t step,
                                   FaultHook* hook, bool with_aux) {
  const std::size_t m = u_prev.size();
  const double r = problem.mesh_ratio();
  const double dt = problem.dt;
  const auto u = u_prev.values();

  std::vector<double> lap(m);
  apply_second_difference(u, lap);

  StepOutput out;
  out.step_index = step;

  std::vector<double> rhs(m);
  for (std::size_t j = 0; j < m; ++j) {
    rhs[j] = u[j] + 0.5 * r * lap[j] + 0.5 * dt * (q_prev[j] + q_next[j]);
  }
  if (hook != nullptr) hook->on_linear_rhs(step, rhs);
  out.base = State::zeros_like(u_prev);
  solve_implicit(0.5 * r, rhs, out.base.values());

  if (with_aux && u_prev2 != nullptr) {
    out.auxiliary = State::zeros_like(u_prev);
    const auto older = u_prev2->values();
    for (std::size_t j = 0; j < m; ++j) {
      out.auxiliary[j] = older[j] + 2.0 * r * lap[j] + 2.0 * dt * q_prev[j];
    }
  }
  return out;
}

StepOutput richardson_cn_pair_step(const HeatProblem& problem, const State& u_prev,
                                   const State* u_prev2, std::size_t step) {
  const auto q_prev = problem.sample_source(problem.grid().t(step - 1));
  const auto q_next = problem.sample_source(problem.grid().t(step));
  return richardson_cn_pair_step(problem, u_prev, u_prev2, q_prev, q_next, step);
}

HeatScheme parse_heat_scheme(std::string_view id) {
  if (id == "fe-be") return HeatScheme::kForwardBackwardEuler;
  if (id == "r-cn") return HeatScheme::kRichardsonCrankNicolson;
  throw ConfigError("unknown heat scheme '" + std::string(id) + "' (expected fe-be or r-cn)");
}

bool is_heat_scheme(std::string_view id) { return id == "fe-be" || id == "r-cn"; }

HeatPairStepper::HeatPairStepper(HeatProblem problem, HeatScheme scheme)
    : problem_(std::move(problem)), scheme_(scheme) {
  problem_.validate();
  grid_ = problem_.grid();
  u_ = problem_.initial_state();
  q_prev_ = problem_.sample_source(grid_.t(0));
}

std::string HeatPairStepper::name() const {
  return scheme_ == HeatScheme::kForwardBackwardEuler ? "fe-be" : "r-cn";
}

std::size_t HeatPairStepper::first_checked_step() const {
  return scheme_ == HeatScheme::kForwardBackwardEuler ? 1 : 2;
}

StepOutput HeatPairStepper::step(FaultHook* hook) {
  const std::size_t k = taken_ + 1;
  if (hook != nullptr) {
    const std::array<std::span<double>, 1> entries{u_.values()};
    hook->on_stored_data(k, entries);
  }
  std::vector<double> q_next = problem_.sample_source(grid_.t(k));
  if (hook != nullptr) hook->on_derivative(k, 0, q_next);

  StepOutput out;
  if (scheme_ == HeatScheme::kForwardBackwardEuler) {
    out = fe_be_pair_step(problem_, u_, q_prev_, q_next, k, hook, auxiliary_enabled());
  } else {
    const State* older = k >= 2 ? &u_prev_ : nullptr;
    out = richardson_cn_pair_step(problem_, u_, older, q_prev_, q_next, k, hook,
                                  auxiliary_enabled());
  }
  u_prev_ = std::move(u_);
  u_ = out.base;
  q_prev_ = std::move(q_next);
  taken_ = k;
  return out;
}

std::optional<FaultTargets> HeatPairStepper::fault_targets(FaultMode) const {
  return FaultTargets{1, u_.size()};
}

HeatProblem table_config(int id, double dt) {
  HeatProblem p;
  p.dt = dt;
  switch (id) {
    case 1:
      p.k = 1.0 / 100.0;
      p.q = [](double x, double t) { return x * std::exp(-t / 2.0); };
      p.v = [](double x) { return 4.0 * x * (x - 1.0) * (x - 2.0); };
      p.dx = 1.0 / 100.0;
      p.t_end = 2.0;
      break;
    case 2:
      p.k = 1.0 / 1000.0;
      // (1 - sqrt(1 - 4(t - t^2))) / (2 - 2t) with sqrt(...) = |1 - 2t|; the
      // removable singularity at t = 1 takes its limit value 1.
      p.q = [](double, double t) { return t < 0.5 ? t / (1.0 - t) : 1.0; };
      p.v = [](double x) { return 6.0 * std::abs(x - 0.5) - 3.0; };
      p.dx = 1.0 / 200.0;
      p.t_end = 1.0;
      break;
    case 3:
      p.k = 1.0 / 100.0;
      p.q = [](double x, double t) {
        return 0.1 * (std::sin(2.0 * std::numbers::pi * t) + std::cos(2.0 * std::numbers::pi * x));
      };
      p.v = [](double x) { return x * (x - 1.0); };
      p.dx = 1.0 / 160.0;
      p.t_end = 2.0;
      break;
    default:
      throw ConfigError("heat configuration id must be 1, 2 or 3");
  }
  p.validate();
  return p;
}

std::array<double, 3> table_time_steps(int id) {
  switch (id) {
    case 1: return {1.0 / 60.0, 1.0 / 100.0, 1.0 / 140.0};
    case 2: return {1.0 / 100.0, 1.0 / 200.0, 1.0 / 400.0};
    case 3: return {1.0 / 100.0, 1.0 / 160.0, 1.0 / 200.0};
    default: throw ConfigError("heat configuration id must be 1, 2 or 3");
  }
}

}  // namespace abcheck::heat
