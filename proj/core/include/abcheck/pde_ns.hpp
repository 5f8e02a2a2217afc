#pragma once

// Two-dimensional incompressible Navier-Stokes in a lid-driven unit cavity,
// advanced by a projection method on a staggered (MAC) grid, and checked by
// order-1 extrapolation of the velocity field.

#include <cstddef>
#include <memory>
#include <vector>

#include "abcheck/core.hpp"

namespace abcheck::ns {

struct NsProblem {
  double re = 0.0;
  std::size_t nx = 40;
  std::size_t ny = 40;
  double dt = 0.0;
  double t_end = 0.0;
  double lid_velocity = 1.0;
  /// Donor-cell blending of the centred advective fluxes, weight
  /// min(1.2 dt max|u|/h, 1). Zero blending gives pure centred differences.
  bool upwind_blend = true;

  /// Throws ConfigError on invalid parameters or an advective CFL above 1.
  void validate() const;
  [[nodiscard]] double hx() const { return 1.0 / static_cast<double>(nx); }
  [[nodiscard]] double hy() const { return 1.0 / static_cast<double>(ny); }
  [[nodiscard]] TimeGrid grid() const { return TimeGrid::covering(0.0, t_end, dt); }
};

/// U lives on vertical faces ((nx-1) x ny), V on horizontal faces
/// (nx x (ny-1)), P at cell centres (nx x ny); all column-major.
struct NsFields {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> p;

  [[nodiscard]] static NsFields zeros(std::size_t nx, std::size_t ny);
  /// Two-field state (U, V); pressure is not part of the checked state.
  [[nodiscard]] State velocity_state() const;
};

/// Projection stepper with the viscous and pressure operators factorized
/// once at construction. Stateless after construction; safe to share
/// read-only across threads.
class ProjectionSolver {
 public:
  explicit ProjectionSolver(NsProblem problem);
  ~ProjectionSolver();
  ProjectionSolver(ProjectionSolver&&) noexcept;
  ProjectionSolver& operator=(ProjectionSolver&&) noexcept;
  ProjectionSolver(const ProjectionSolver&) = delete;
  ProjectionSolver& operator=(const ProjectionSolver&) = delete;

  /// Advective update, implicit viscous solves, pressure Poisson solve and
  /// velocity correction, in that order. The linear-rhs hook sees the
  /// pressure Poisson right-hand side (with the pinned unknown removed).
  [[nodiscard]] NsFields step(const NsFields& fields, std::size_t step_index,
                              FaultHook* hook = nullptr) const;

  [[nodiscard]] const NsProblem& problem() const { return problem_; }
  [[nodiscard]] std::size_t poisson_unknowns() const;

 private:
  struct Impl;
  NsProblem problem_;
  std::unique_ptr<Impl> impl_;
};

[[nodiscard]] NsFields projection_step(const ProjectionSolver& solver, const NsFields& fields);

/// Max over cells of |discrete divergence| including wall fluxes.
[[nodiscard]] double divergence_norm(const NsProblem& problem, const NsFields& fields);

struct NsPairResult {
  NsFields fields;
  StepOutput output;
};

/// Base from the projection step; auxiliary 2 (U, V)^{n} - (U, V)^{n-1} when
/// `prev2` is available. The checked state is the velocity pair.
[[nodiscard]] NsPairResult ns_pair_step(const ProjectionSolver& solver, const NsFields& prev,
                                        const NsFields* prev2, std::size_t step,
                                        FaultHook* hook = nullptr, bool with_aux = true);

class NsPairStepper final : public PairStepper {
 public:
  explicit NsPairStepper(NsProblem problem);

  [[nodiscard]] std::string name() const override { return "projection-extrapolation1"; }
  [[nodiscard]] std::size_t step_count() const override { return grid_.n_steps; }
  [[nodiscard]] std::size_t first_checked_step() const override { return 2; }
  [[nodiscard]] std::size_t steps_taken() const override { return taken_; }
  [[nodiscard]] const State& current() const override { return current_state_; }
  StepOutput step(FaultHook* hook) override;
  [[nodiscard]] std::optional<FaultTargets> fault_targets(FaultMode mode) const override;

  [[nodiscard]] const NsFields& fields() const { return fields_; }
  [[nodiscard]] const ProjectionSolver& solver() const { return solver_; }

 private:
  ProjectionSolver solver_;
  TimeGrid grid_;
  NsFields fields_;
  NsFields prev_fields_;
  State current_state_;
  std::size_t taken_ = 0;
};

/// Driven cavity on a 40 x 40 grid, dt = 1/100, T = 2, lid speed 1.
[[nodiscard]] NsProblem driven_cavity(double re);

}  // namespace abcheck::ns
