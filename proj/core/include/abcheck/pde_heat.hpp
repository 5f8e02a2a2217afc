#pragma once

// Finite-difference pairs for u_t = k u_xx + q(x, t) on [0, 1] with
// homogeneous Dirichlet boundaries. States hold interior nodes only.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "abcheck/core.hpp"

namespace abcheck::heat {

using SourceFn = std::function<double(double x, double t)>;
using InitialFn = std::function<double(double x)>;

struct HeatProblem {
  double k = 0.0;
  SourceFn q;
  InitialFn v;
  double dx = 0.0;
  double dt = 0.0;
  double t_end = 0.0;

  /// Throws ConfigError unless k, dx, dt > 0, 1/dx and t_end/dt are integers.
  void validate() const;
  [[nodiscard]] std::size_t interior_nodes() const;
  [[nodiscard]] double x(std::size_t j) const { return static_cast<double>(j + 1) * dx; }
  /// r = k dt / dx^2.
  [[nodiscard]] double mesh_ratio() const { return k * dt / (dx * dx); }
  /// Whether forward Euler would be stable run closed-loop (r <= 1/2).
  [[nodiscard]] bool forward_euler_stable() const { return mesh_ratio() <= 0.5; }
  [[nodiscard]] TimeGrid grid() const { return TimeGrid::covering(0.0, t_end, dt); }
  [[nodiscard]] State initial_state() const;
  [[nodiscard]] std::vector<double> sample_source(double t) const;
};

/// out_j = u_{j-1} - 2 u_j + u_{j+1} with zero boundary values.
void apply_second_difference(std::span<const double> u, std::span<double> out);

/// Backward Euler base (tridiagonal solve) checked by forward Euler (one
/// matrix-vector product). `q_prev` and `q_next` are the source samples at
/// t_{step-1} and t_step; the linear-rhs hook sees the backward Euler
/// right-hand side before the solve.
[[nodiscard]] StepOutput fe_be_pair_step(const HeatProblem& problem, const State& u_prev,
                                         std::span<const double> q_prev,
                                         std::span<const double> q_next, std::size_t step,
                                         FaultHook* hook = nullptr, bool with_aux = true);
/// Convenience overload sampling q at both time levels.
[[nodiscard]] StepOutput fe_be_pair_step(const HeatProblem& problem, const State& u_prev,
                                         std::size_t step);

/// Crank-Nicolson base checked by the Richardson (leapfrog) scheme built
/// from the two previous base solutions. `u_prev2` may be null, in which
/// case the step is unchecked (start-up).
[[nodiscard]] StepOutput richardson_cn_pair_step(const HeatProblem& problem, const State& u_prev,
                                                 const State* u_prev2,
                                                 std::span<const double> q_prev,
                                                 std::span<const double> q_next, std::size_t step,
                                                 FaultHook* hook = nullptr, bool with_aux = true);
[[nodiscard]] StepOutput richardson_cn_pair_step(const HeatProblem& problem, const State& u_prev,
                                                 const State* u_prev2, std::size_t step);

enum class HeatScheme { kForwardBackwardEuler, kRichardsonCrankNicolson };

[[nodiscard]] HeatScheme parse_heat_scheme(std::string_view id);
[[nodiscard]] bool is_heat_scheme(std::string_view id);

/// Owns one trial's trajectory. Source samples are evaluated once per time
/// level and reused by the next step, so a corrupted sample at t_k reaches
/// the explicit auxiliary one step after the implicit base.
class HeatPairStepper final : public PairStepper {
 public:
  HeatPairStepper(HeatProblem problem, HeatScheme scheme);

  [[nodiscard]] std::string name() const override;
  [[nodiscard]] std::size_t step_count() const override { return grid_.n_steps; }
  [[nodiscard]] std::size_t first_checked_step() const override;
  [[nodiscard]] std::size_t steps_taken() const override { return taken_; }
  [[nodiscard]] const State& current() const override { return u_; }
  StepOutput step(FaultHook* hook) override;
  [[nodiscard]] std::optional<FaultTargets> fault_targets(FaultMode mode) const override;

  [[nodiscard]] const HeatProblem& problem() const { return problem_; }

 private:
  HeatProblem problem_;
  HeatScheme scheme_;
  TimeGrid grid_;
  State u_;
  State u_prev_;
  std::vector<double> q_prev_;
  std::size_t taken_ = 0;
};

/// Table rows of the three reference configurations (1-based id).
[[nodiscard]] HeatProblem table_config(int id, double dt);
/// The three step sizes studied for each configuration.
[[nodiscard]] std::array<double, 3> table_time_steps(int id);

}  // namespace abcheck::heat
