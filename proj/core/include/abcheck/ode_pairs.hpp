#pragma once

// Base/auxiliary scheme pairs for first-order systems u' = f(t, u):
// embedded Runge-Kutta pairs, Adams-Bashforth (p-1, p) pairs, an implicit
// Adams-Moulton base checked by the explicit Adams-Bashforth predictor, and
// order-1 extrapolation.

#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abcheck/core.hpp"

namespace abcheck::ode {

using Rhs = std::function<void(double t, std::span<const double> u, std::span<double> dudt)>;
/// Row-major n x n Jacobian df/du.
using Jacobian = std::function<void(double t, std::span<const double> u, std::span<double> jac)>;

struct OdeProblem {
  Rhs f;
  State u0;
  TimeGrid grid;
  Jacobian jacobian;  // optional; forward differences are used when empty

  [[nodiscard]] State eval(double t, const State& u) const;
};

/// Explicit embedded Runge-Kutta tableau. The higher-order combination `b`
/// is the base scheme, `b_hat` the auxiliary.
struct RkTableau {
  std::string name;
  std::vector<std::vector<double>> a;  // row i holds a_{i,0..i-1}
  std::vector<double> c;
  std::vector<double> b;
  std::vector<double> b_hat;  // empty for a base-only tableau
  int order_base = 0;
  int order_aux = 0;

  [[nodiscard]] std::size_t stages() const { return b.size(); }
  /// Throws ConfigError unless the weights are consistent and nodes in [0, 1].
  void validate() const;

  [[nodiscard]] static RkTableau fehlberg45();
  [[nodiscard]] static RkTableau bogacki_shampine23();
  [[nodiscard]] static RkTableau midpoint_euler();
  [[nodiscard]] static RkTableau classical_rk4();
};

/// Adams-Bashforth weights of the given order (1..5), newest evaluation first.
[[nodiscard]] std::span<const double> adams_bashforth_weights(int order);
/// Adams-Moulton weights of the given order (1..5); element 0 multiplies the
/// implicit f(t_{n+1}, u_{n+1}).
[[nodiscard]] std::span<const double> adams_moulton_weights(int order);

/// Multistep history. Holds up to `order` states (newest last) and the
/// derivative evaluations of every stored state except the newest; the step
/// that consumes the newest state evaluates its derivative.
struct LmmHistory {
  std::size_t order = 0;
  std::deque<State> states;
  std::deque<State> derivatives;
  std::size_t newest_index = 0;  // step index of states.back()
};

struct NewtonConfig {
  double tolerance = 1e-12;  // residual infinity norm, relative to max(1, |u|_inf)
  int max_iterations = 25;
};

/// One embedded RK step from u_prev at t_{step-1}. Every stage is evaluated
/// exactly once and shared by both weight combinations.
[[nodiscard]] StepOutput rk_pair_step(const OdeProblem& problem, const RkTableau& tableau,
                                      const State& u_prev, std::size_t step,
                                      FaultHook* hook = nullptr, bool with_aux = true);

/// Adams-Bashforth pair step: evaluates f at the newest stored state (the
/// only new evaluation), then combines the same evaluations with order
/// p_base weights (base) and p_aux weights (auxiliary). Appends the base
/// result to `history`.
StepOutput ab_pair_step(const OdeProblem& problem, LmmHistory& history, int p_aux, int p_base,
                        FaultHook* hook = nullptr, bool with_aux = true);

/// Adams-Moulton base of order p solved by Newton's method, checked by the
/// order-p Adams-Bashforth combination of the same data. The AB value is
/// also the Newton starting iterate. Throws SolverFailure on non-convergence.
StepOutput am_base_ab_aux_step(const OdeProblem& problem, LmmHistory& history, int p,
                               const NewtonConfig& newton = {}, FaultHook* hook = nullptr,
                               bool with_aux = true);

/// 2 * b_prev - b_prev2.
[[nodiscard]] State extrapolation_aux(const State& b_prev, const State& b_prev2);

/// States u_0 .. u_{p-1} by classical RK4 at the problem's step size, plus
/// the derivatives of all but the newest.
[[nodiscard]] LmmHistory bootstrap_history(const OdeProblem& problem, std::size_t p);

class RkPairStepper final : public PairStepper {
 public:
  RkPairStepper(OdeProblem problem, RkTableau tableau);

  [[nodiscard]] std::string name() const override { return tableau_.name; }
  [[nodiscard]] std::size_t step_count() const override { return problem_.grid.n_steps; }
  [[nodiscard]] std::size_t first_checked_step() const override { return 1; }
  [[nodiscard]] std::size_t steps_taken() const override { return taken_; }
  [[nodiscard]] const State& current() const override { return u_; }
  StepOutput step(FaultHook* hook) override;
  [[nodiscard]] std::optional<FaultTargets> fault_targets(FaultMode mode) const override;

 private:
  OdeProblem problem_;
  RkTableau tableau_;
  State u_;
  std::size_t taken_ = 0;
};

/// Common driver for the Adams families: RK4 start-up steps are reported as
/// unchecked, then every step is a multistep pair step.
class AdamsPairStepper final : public PairStepper {
 public:
  enum class Kind { kBashforthPair, kMoultonBase };

  AdamsPairStepper(OdeProblem problem, Kind kind, int p_aux, int p_base,
                   NewtonConfig newton = {});

  [[nodiscard]] std::string name() const override;
  [[nodiscard]] std::size_t step_count() const override { return problem_.grid.n_steps; }
  [[nodiscard]] std::size_t first_checked_step() const override;
  [[nodiscard]] std::size_t steps_taken() const override { return taken_; }
  [[nodiscard]] const State& current() const override;
  StepOutput step(FaultHook* hook) override;
  [[nodiscard]] std::optional<FaultTargets> fault_targets(FaultMode mode) const override;

  [[nodiscard]] const LmmHistory& history() const { return history_; }

 private:
  OdeProblem problem_;
  Kind kind_;
  int p_aux_;
  int p_base_;
  NewtonConfig newton_;
  LmmHistory history_;
  std::size_t taken_ = 0;
};

/// Classical RK4 base with the order-1 extrapolation auxiliary.
class ExtrapolationStepper final : public PairStepper {
 public:
  explicit ExtrapolationStepper(OdeProblem problem);

  [[nodiscard]] std::string name() const override { return "extrapolation1"; }
  [[nodiscard]] std::size_t step_count() const override { return problem_.grid.n_steps; }
  [[nodiscard]] std::size_t first_checked_step() const override { return 2; }
  [[nodiscard]] std::size_t steps_taken() const override { return taken_; }
  [[nodiscard]] const State& current() const override { return u_; }
  StepOutput step(FaultHook* hook) override;
  [[nodiscard]] std::optional<FaultTargets> fault_targets(FaultMode mode) const override;

 private:
  OdeProblem problem_;
  RkTableau rk4_;
  State u_;
  State u_prev_;
  std::size_t taken_ = 0;
};

/// Scheme identifiers: rk45, rk23, rk-midpoint-euler, ab23, ab45, am-ab:<p>,
/// extrapolation1.
[[nodiscard]] std::unique_ptr<PairStepper> make_ode_stepper(std::string_view scheme,
                                                            OdeProblem problem);
[[nodiscard]] bool is_ode_scheme(std::string_view scheme);

namespace problems {

/// u'' - b (1 - u^2) u' + u = 0 as the system (u, u'), u(0) = 1, u'(0) = 0.
[[nodiscard]] OdeProblem van_der_pol(double b, double dt, double t_end = 14.0);
/// u' = u, u(0) = 1.
[[nodiscard]] OdeProblem exponential(double dt, double t_end);
/// u' = -1000 (u - cos t), u(0) = 0.
[[nodiscard]] OdeProblem stiff_cosine(double dt, double t_end);

}  // namespace problems

}  // namespace abcheck::ode
