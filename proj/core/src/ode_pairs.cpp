#include "abcheck/ode_pairs.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace abcheck::ode {

namespace {

constexpr std::array<double, 1> kAb1{1.0};
constexpr std::array<double, 2> kAb2{3.0 / 2.0, -1.0 / 2.0};
constexpr std::array<double, 3> kAb3{23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0};
constexpr std::array<double, 4> kAb4{55.0 / 24.0, -59.0 / 24.0, 37.0 / 24.0, -9.0 / 24.0};
constexpr std::array<double, 5> kAb5{1901.0 / 720.0, -2774.0 / 720.0, 2616.0 / 720.0,
                                     -1274.0 / 720.0, 251.0 / 720.0};

constexpr std::array<double, 1> kAm1{1.0};
constexpr std::array<double, 2> kAm2{1.0 / 2.0, 1.0 / 2.0};
constexpr std::array<double, 3> kAm3{5.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};
constexpr std::array<double, 4> kAm4{9.0 / 24.0, 19.0 / 24.0, -5.0 / 24.0, 1.0 / 24.0};
constexpr std::array<double, 5> kAm5{251.0 / 720.0, 646.0 / 720.0, -264.0 / 720.0,
                                     106.0 / 720.0, -19.0 / 720.0};

// u + h * sum_i w_i * evals[newest - i]
void combine(std::span<double> out, const State& u, double h, std::span<const double> w,
             const std::deque<State>& evals) {
  std::copy(u.values().begin(), u.values().end(), out.begin());
  const std::size_t newest = evals.size() - 1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto f = evals[newest - i].values();
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += h * w[i] * f[j];
  }
}

void trim(LmmHistory& history, std::size_t keep_derivatives) {
  while (history.states.size() > history.order) history.states.pop_front();
  while (history.derivatives.size() > keep_derivatives) history.derivatives.pop_front();
}

void fd_jacobian(const OdeProblem& problem, double t, const State& u, const State& fu,
                 Eigen::MatrixXd& jac) {
  const std::size_t n = u.size();
  State probe = u;
  State fp = State::zeros_like(u);
  for (std::size_t j = 0; j < n; ++j) {
    const double step = std::sqrt(std::numeric_limits<double>::epsilon()) *
                        std::max(1.0, std::abs(u[j]));
    probe[j] = u[j] + step;
    problem.f(t, probe.values(), fp.values());
    for (std::size_t i = 0; i < n; ++i) {
      jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (fp[i] - fu[i]) / step;
    }
    probe[j] = u[j];
  }
}

}  // namespace

State OdeProblem::eval(double t, const State& u) const {
  State out = State::zeros_like(u);
  f(t, u.values(), out.values());
  return out;
}

void RkTableau::validate() const {
  const std::size_t s = b.size();
  if (s == 0 || c.size() != s || a.size() != s) {
    throw ConfigError("RkTableau " + name + ": inconsistent stage count");
  }
  if (!b_hat.empty() && b_hat.size() != s) {
    throw ConfigError("RkTableau " + name + ": auxiliary weights have the wrong length");
  }
  for (std::size_t i = 0; i < s; ++i) {
    if (a[i].size() != i) throw ConfigError("RkTableau " + name + ": A must be strictly lower");
    if (c[i] < 0.0 || c[i] > 1.0) throw ConfigError("RkTableau " + name + ": node outside [0, 1]");
  }
  auto sums_to_one = [](const std::vector<double>& w) {
    return std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) < 1e-12;
  };
  if (!sums_to_one(b) || (!b_hat.empty() && !sums_to_one(b_hat))) {
    throw ConfigError("RkTableau " + name + ": weights do not sum to one");
  }
}

RkTableau RkTableau::fehlberg45() {
  RkTableau t;
  t.name = "rk45";
  t.c = {0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0};
  t.a = {{},
         {1.0 / 4.0},
         {3.0 / 32.0, 9.0 / 32.0},
         {1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0},
         {439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0},
         {-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0}};
  t.b = {16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0};
  t.b_hat = {25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0};
  t.order_base = 5;
  t.order_aux = 4;
  return t;
}

RkTableau RkTableau::bogacki_shampine23() {
  RkTableau t;
  t.name = "rk23";
  t.c = {0.0, 1.0 / 2.0, 3.0 / 4.0, 1.0};
  t.a = {{}, {1.0 / 2.0}, {0.0, 3.0 / 4.0}, {2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0}};
  t.b = {2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0, 0.0};
  t.b_hat = {7.0 / 24.0, 1.0 / 4.0, 1.0 / 3.0, 1.0 / 8.0};
  t.order_base = 3;
  t.order_aux = 2;
  return t;
}

RkTableau RkTableau::midpoint_euler() {
  RkTableau t;
  t.name = "rk-midpoint-euler";
  t.c = {0.0, 1.0 / 2.0};
  t.a = {{}, {1.0 / 2.0}};
  t.b = {0.0, 1.0};
  t.b_hat = {1.0, 0.0};
  t.order_base = 2;
  t.order_aux = 1;
  return t;
}

RkTableau RkTableau::classical_rk4() {
  RkTableau t;
  t.name = "rk4";
  t.c = {0.0, 1.0 / 2.0, 1.0 / 2.0, 1.0};
  t.a = {{}, {1.0 / 2.0}, {0.0, 1.0 / 2.0}, {0.0, 0.0, 1.0}};
  t.b = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
  t.order_base = 4;
  return t;
}

std::span<const double> adams_bashforth_weights(int order) {
  switch (order) {
    case 1: return kAb1;
    case 2: return kAb2;
    case 3: return kAb3;
    case 4: return kAb4;
    case 5: return kAb5;
    default: throw ConfigError("Adams-Bashforth order must be 1..5");
  }
}

std::span<const double> adams_moulton_weights(int order) {
  switch (order) {
    case 1: return kAm1;
    case 2: return kAm2;
    case 3: return kAm3;
    case 4: return kAm4;
    case 5: return kAm5;
    default: throw ConfigError("Adams-Moulton order must be 1..5");
  }
}

StepOutput rk_pair_step(const OdeProblem& problem, const RkTableau& tableau, const State& u_prev,
                        std::size_t step, FaultHook* hook, bool with_aux) {
  const std::size_t s = tableau.stages();
  const double h = problem.grid.dt;
  const double t = problem.grid.t(step - 1);
  const std::size_t n = u_prev.size();

  std::vector<State> k(s, State::zeros_like(u_prev));
  State y = u_prev;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = u_prev[j];
      for (std::size_t m = 0; m < i; ++m) acc += h * tableau.a[i][m] * k[m][j];
      y[j] = acc;
    }
    problem.f(t + tableau.c[i] * h, y.values(), k[i].values());
    if (hook != nullptr) hook->on_derivative(step, i, k[i].values());
  }

  StepOutput out;
  out.step_index = step;
  out.base = u_prev;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.base[j] += h * tableau.b[i] * k[i][j];
  }
  if (with_aux && !tableau.b_hat.empty()) {
    out.auxiliary = u_prev;
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = 0; j < n; ++j) out.auxiliary[j] += h * tableau.b_hat[i] * k[i][j];
    }
  }
  return out;
}

StepOutput ab_pair_step(const OdeProblem& problem, LmmHistory& history, int p_aux, int p_base,
                        FaultHook* hook, bool with_aux) {
  if (p_aux < 1 || p_base < 1 || p_base > 5 || p_aux > 5) {
    throw ConfigError("ab_pair_step: orders must be in 1..5");
  }
  const auto needed = static_cast<std::size_t>(std::max(p_aux, p_base)) - 1;
  if (history.states.empty() || history.derivatives.size() < needed) {
    throw std::logic_error("ab_pair_step: history is not bootstrapped");
  }
  const std::size_t step = history.newest_index + 1;
  const double h = problem.grid.dt;
  const State& u = history.states.back();

  State f_new = problem.eval(problem.grid.t(step - 1), u);
  if (hook != nullptr) hook->on_derivative(step, 0, f_new.values());
  history.derivatives.push_back(std::move(f_new));

  StepOutput out;
  out.step_index = step;
  out.base = State::zeros_like(u);
  combine(out.base.values(), u, h, adams_bashforth_weights(p_base), history.derivatives);
  if (with_aux) {
    out.auxiliary = State::zeros_like(u);
    combine(out.auxiliary.values(), u, h, adams_bashforth_weights(p_aux), history.derivatives);
  }

  history.states.push_back(out.base);
  history.newest_index = step;
  trim(history, needed);
  return out;
}

StepOutput am_base_ab_aux_step(const OdeProblem& problem, LmmHistory& history, int p,
                               const NewtonConfig& newton, FaultHook* hook, bool with_aux) {
  if (p < 1 || p > 5) throw ConfigError("am_base_ab_aux_step: order must be in 1..5");
  const auto needed = static_cast<std::size_t>(p) - 1;
  if (history.states.empty() || history.derivatives.size() < needed) {
    throw std::logic_error("am_base_ab_aux_step: history is not bootstrapped");
  }
  const std::size_t step = history.newest_index + 1;
  const double h = problem.grid.dt;
  const double t_new = problem.grid.t(step);
  const State& u = history.states.back();
  const std::size_t n = u.size();

  State f_new = problem.eval(problem.grid.t(step - 1), u);
  if (hook != nullptr) hook->on_derivative(step, 0, f_new.values());
  history.derivatives.push_back(std::move(f_new));

  // Predictor: order-p Adams-Bashforth on the stored data.
  State predictor = State::zeros_like(u);
  combine(predictor.values(), u, h, adams_bashforth_weights(p), history.derivatives);

  // Explicit part of the corrector: u_n + h * sum_{i>=1} beta_i f_{n+1-i}.
  const auto beta = adams_moulton_weights(p);
  State explicit_part = State::zeros_like(u);
  combine(explicit_part.values(), u, h, beta.subspan(1), history.derivatives);
  const double h_beta0 = h * beta[0];

  State x = predictor;
  State fx = problem.eval(t_new, x);
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::VectorXd residual(static_cast<Eigen::Index>(n));
  std::vector<double> jac_flat(n * n);

  auto compute_residual = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      residual(static_cast<Eigen::Index>(i)) = x[i] - explicit_part[i] - h_beta0 * fx[i];
    }
    return residual.lpNorm<Eigen::Infinity>();
  };

  double res = compute_residual();
  int iter = 0;
  while (res > newton.tolerance * std::max(1.0, vector_norm(x.values()))) {
    if (iter++ >= newton.max_iterations || !std::isfinite(res)) {
      throw SolverFailure("Adams-Moulton Newton iteration did not converge at step " +
                          std::to_string(step));
    }
    if (problem.jacobian) {
      problem.jacobian(t_new, x.values(), jac_flat);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = jac_flat[i * n + j];
        }
      }
    } else {
      fd_jacobian(problem, t_new, x, fx, jac);
    }
    const Eigen::MatrixXd g =
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) -
        h_beta0 * jac;
    const Eigen::VectorXd delta = g.partialPivLu().solve(-residual);
    for (std::size_t i = 0; i < n; ++i) x[i] += delta(static_cast<Eigen::Index>(i));
    problem.f(t_new, x.values(), fx.values());
    res = compute_residual();
  }

  StepOutput out;
  out.step_index = step;
  out.base = std::move(x);
  if (with_aux) out.auxiliary = std::move(predictor);

  history.states.push_back(out.base);
  history.newest_index = step;
  trim(history, needed);
  return out;
}

State extrapolation_aux(const State& b_prev, const State& b_prev2) {
  if (!b_prev.same_layout(b_prev2)) {
    throw ConfigError("extrapolation_aux: states differ in layout");
  }
  State out = State::zeros_like(b_prev);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 2.0 * b_prev[i] - b_prev2[i];
  return out;
}

LmmHistory bootstrap_history(const OdeProblem& problem, std::size_t p) {
  if (p < 1) throw ConfigError("bootstrap_history: order must be at least 1");
  const RkTableau rk4 = RkTableau::classical_rk4();
  LmmHistory history;
  history.order = p;
  history.states.push_back(problem.u0);
  history.newest_index = 0;
  for (std::size_t k = 1; k < p; ++k) {
    const State& u = history.states.back();
    // The first RK4 stage is f(t_{k-1}, u_{k-1}); keep it as the stored derivative.
    history.derivatives.push_back(problem.eval(problem.grid.t(k - 1), u));
    StepOutput out = rk_pair_step(problem, rk4, u, k, nullptr, false);
    if (!out.base.all_finite()) {
      throw SolverFailure("bootstrap_history: non-finite start-up value at step " +
                          std::to_string(k));
    }
    history.states.push_back(std::move(out.base));
    history.newest_index = k;
  }
  return history;
}

RkPairStepper::RkPairStepper(OdeProblem problem, RkTableau tableau)
    : problem_(std::move(problem)), tableau_(std::move(tableau)), u_(problem_.u0) {
  tableau_.validate();
}

StepOutput RkPairStepper::step(FaultHook* hook) {
  const std::size_t k = taken_ + 1;
  if (hook != nullptr) {
    const std::array<std::span<double>, 1> entries{u_.values()};
    hook->on_stored_data(k, entries);
  }
  StepOutput out = rk_pair_step(problem_, tableau_, u_, k, hook, auxiliary_enabled());
  u_ = out.base;
  taken_ = k;
  return out;
}

std::optional<FaultTargets> RkPairStepper::fault_targets(FaultMode mode) const {
  switch (mode) {
    case FaultMode::kDerivativeEval: return FaultTargets{tableau_.stages(), u_.size()};
    case FaultMode::kPreviousSolution: return FaultTargets{1, u_.size()};
    case FaultMode::kLinearRhs: return std::nullopt;
  }
  return std::nullopt;
}

AdamsPairStepper::AdamsPairStepper(OdeProblem problem, Kind kind, int p_aux, int p_base,
                                   NewtonConfig newton)
    : problem_(std::move(problem)), kind_(kind), p_aux_(p_aux), p_base_(p_base),
      newton_(newton) {
  if (p_base < 1 || p_base > 5 || p_aux < 1 || p_aux > 5) {
    throw ConfigError("Adams orders must be in 1..5");
  }
  history_ = bootstrap_history(problem_, static_cast<std::size_t>(std::max(p_aux, p_base)));
}

std::string AdamsPairStepper::name() const {
  if (kind_ == Kind::kMoultonBase) return "am-ab:" + std::to_string(p_base_);
  return "ab" + std::to_string(p_aux_) + std::to_string(p_base_);
}

std::size_t AdamsPairStepper::first_checked_step() const { return history_.order; }

const State& AdamsPairStepper::current() const {
  if (taken_ + 1 < history_.order) return history_.states[taken_];
  return history_.states.back();
}

StepOutput AdamsPairStepper::step(FaultHook* hook) {
  const std::size_t k = taken_ + 1;
  if (k < history_.order) {
    // Start-up value already computed by the bootstrap.
    StepOutput out;
    out.step_index = k;
    out.base = history_.states[k];
    taken_ = k;
    return out;
  }
  if (hook != nullptr) {
    std::vector<std::span<double>> entries;
    entries.push_back(history_.states.back().values());
    for (auto it = history_.derivatives.rbegin(); it != history_.derivatives.rend(); ++it) {
      entries.push_back(it->values());
    }
    hook->on_stored_data(k, entries);
  }
  StepOutput out =
      kind_ == Kind::kBashforthPair
          ? ab_pair_step(problem_, history_, p_aux_, p_base_, hook, auxiliary_enabled())
          : am_base_ab_aux_step(problem_, history_, p_base_, newton_, hook, auxiliary_enabled());
  taken_ = k;
  return out;
}

std::optional<FaultTargets> AdamsPairStepper::fault_targets(FaultMode mode) const {
  const std::size_t n = problem_.u0.size();
  switch (mode) {
    case FaultMode::kDerivativeEval: return FaultTargets{1, n};
    case FaultMode::kPreviousSolution: return FaultTargets{history_.order, n};
    case FaultMode::kLinearRhs: return std::nullopt;
  }
  return std::nullopt;
}

ExtrapolationStepper::ExtrapolationStepper(OdeProblem problem)
    : problem_(std::move(problem)), rk4_(RkTableau::classical_rk4()), u_(problem_.u0) {}

StepOutput ExtrapolationStepper::step(FaultHook* hook) {
  const std::size_t k = taken_ + 1;
  if (hook != nullptr) {
    const std::array<std::span<double>, 1> entries{u_.values()};
    hook->on_stored_data(k, entries);
  }
  StepOutput out = rk_pair_step(problem_, rk4_, u_, k, hook, false);
  if (auxiliary_enabled() && k >= 2) out.auxiliary = extrapolation_aux(u_, u_prev_);
  u_prev_ = std::move(u_);
  u_ = out.base;
  taken_ = k;
  return out;
}

std::optional<FaultTargets> ExtrapolationStepper::fault_targets(FaultMode mode) const {
  switch (mode) {
    case FaultMode::kDerivativeEval: return FaultTargets{rk4_.stages(), u_.size()};
    case FaultMode::kPreviousSolution: return FaultTargets{1, u_.size()};
    case FaultMode::kLinearRhs: return std::nullopt;
  }
  return std::nullopt;
}

bool is_ode_scheme(std::string_view scheme) {
  return scheme == "rk45" || scheme == "rk23" || scheme == "rk-midpoint-euler" ||
         scheme == "ab23" || scheme == "ab45" || scheme == "extrapolation1" ||
         scheme.starts_with("am-ab:");
}

std::unique_ptr<PairStepper> make_ode_stepper(std::string_view scheme, OdeProblem problem) {
  if (scheme == "rk45") {
    return std::make_unique<RkPairStepper>(std::move(problem), RkTableau::fehlberg45());
  }
  if (scheme == "rk23") {
    return std::make_unique<RkPairStepper>(std::move(problem), RkTableau::bogacki_shampine23());
  }
  if (scheme == "rk-midpoint-euler") {
    return std::make_unique<RkPairStepper>(std::move(problem), RkTableau::midpoint_euler());
  }
  if (scheme == "ab23") {
    return std::make_unique<AdamsPairStepper>(std::move(problem),
                                              AdamsPairStepper::Kind::kBashforthPair, 2, 3);
  }
  if (scheme == "ab45") {
    return std::make_unique<AdamsPairStepper>(std::move(problem),
                                              AdamsPairStepper::Kind::kBashforthPair, 4, 5);
  }
  if (scheme == "extrapolation1") {
    return std::make_unique<ExtrapolationStepper>(std::move(problem));
  }
  if (scheme.starts_with("am-ab:")) {
    const auto digits = scheme.substr(6);
    int p = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || p < 1 || p > 5) {
      throw ConfigError("am-ab order must be an integer in 1..5: '" + std::string(scheme) + "'");
    }
    return std::make_unique<AdamsPairStepper>(std::move(problem),
                                              AdamsPairStepper::Kind::kMoultonBase, p, p);
  }
  throw ConfigError("unknown ODE scheme '" + std::string(scheme) + "'");
}

namespace problems {

OdeProblem van_der_pol(double b, double dt, double t_end) {
  OdeProblem p;
  p.f = [b](double, std::span<const double> u, std::span<double> du) {
    du[0] = u[1];
    du[1] = b * (1.0 - u[0] * u[0]) * u[1] - u[0];
  };
  p.jacobian = [b](double, std::span<const double> u, std::span<double> jac) {
    jac[0] = 0.0;
    jac[1] = 1.0;
    jac[2] = -2.0 * b * u[0] * u[1] - 1.0;
    jac[3] = b * (1.0 - u[0] * u[0]);
  };
  p.u0 = State(std::vector<double>{1.0, 0.0});
  p.grid = TimeGrid::covering(0.0, t_end, dt);
  return p;
}

OdeProblem exponential(double dt, double t_end) {
  OdeProblem p;
  p.f = [](double, std::span<const double> u, std::span<double> du) {
    for (std::size_t i = 0; i < u.size(); ++i) du[i] = u[i];
  };
  p.u0 = State(std::vector<double>{1.0});
  p.grid = TimeGrid::covering(0.0, t_end, dt);
  return p;
}

OdeProblem stiff_cosine(double dt, double t_end) {
  OdeProblem p;
  p.f = [](double t, std::span<const double> u, std::span<double> du) {
    du[0] = -1000.0 * (u[0] - std::cos(t));
  };
  p.jacobian = [](double, std::span<const double>, std::span<double> jac) { jac[0] = -1000.0; };
  p.u0 = State(std::vector<double>{0.0});
  p.grid = TimeGrid::covering(0.0, t_end, dt);
  return p;
}

}  // namespace problems

}  // namespace abcheck::ode
