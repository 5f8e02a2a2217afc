#include "abcheck/pde_ns.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "abcheck/ode_pairs.hpp"

namespace abcheck::ns {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

// One-dimensional second-difference operator of size n with end diagonal
// entries `end` (1: Neumann, 2: Dirichlet on the face, 3: Dirichlet half a
// cell away through a ghost value), scaled by 1/h^2. Positive definite sign.
std::vector<std::array<double, 3>> second_difference_1d(std::size_t n, double h, double end) {
  std::vector<std::array<double, 3>> rows(n);  // {sub, diag, super}
  const double s = 1.0 / (h * h);
  for (std::size_t i = 0; i < n; ++i) {
    const bool boundary = i == 0 || i + 1 == n;
    rows[i] = {i > 0 ? -s : 0.0, (boundary ? end : 2.0) * s, i + 1 < n ? -s : 0.0};
  }
  if (n == 1) rows[0][1] = (2.0 * end - 2.0) * s;
  return rows;
}

// identity_scale * I + coeff * (kron(I_ny, Ax) + kron(Ay, I_nx)), column-major
// with the x index fastest.
SpMat assemble_2d(std::size_t nx, std::size_t ny, double hx, double hy, double end_x,
                  double end_y, double identity_scale, double coeff) {
  const auto ax = second_difference_1d(nx, hx, end_x);
  const auto ay = second_difference_1d(ny, hy, end_y);
  Triplets t;
  t.reserve(nx * ny * 5);
  auto idx = [nx](std::size_t i, std::size_t j) { return static_cast<int>(i + j * nx); };
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const int row = idx(i, j);
      t.emplace_back(row, row, identity_scale + coeff * (ax[i][1] + ay[j][1]));
      if (i > 0) t.emplace_back(row, idx(i - 1, j), coeff * ax[i][0]);
      if (i + 1 < nx) t.emplace_back(row, idx(i + 1, j), coeff * ax[i][2]);
      if (j > 0) t.emplace_back(row, idx(i, j - 1), coeff * ay[j][0]);
      if (j + 1 < ny) t.emplace_back(row, idx(i, j + 1), coeff * ay[j][2]);
    }
  }
  SpMat m(static_cast<int>(nx * ny), static_cast<int>(nx * ny));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

struct ProjectionSolver::Impl {
  Eigen::SimplicialLLT<SpMat> viscous_u;
  Eigen::SimplicialLLT<SpMat> viscous_v;
  Eigen::SimplicialLDLT<SpMat> pressure;  // Neumann Laplacian with P(0, 0) pinned to 0
  std::size_t pressure_unknowns = 0;
};

void NsProblem::validate() const {
  if (!(re > 0.0)) throw ConfigError("ns: Reynolds number must be positive");
  if (nx < 3 || ny < 3) throw ConfigError("ns: grid must have at least 3 cells per direction");
  if (!(dt > 0.0)) throw ConfigError("ns: dt must be positive");
  const double cfl = std::abs(lid_velocity) * dt / std::min(hx(), hy());
  if (cfl > 1.0) {
    throw ConfigError("ns: advective CFL " + std::to_string(cfl) + " exceeds 1");
  }
  (void)grid();
}

NsFields NsFields::zeros(std::size_t nx, std::size_t ny) {
  NsFields f;
  f.nx = nx;
  f.ny = ny;
  f.u.assign((nx - 1) * ny, 0.0);
  f.v.assign(nx * (ny - 1), 0.0);
  f.p.assign(nx * ny, 0.0);
  return f;
}

State NsFields::velocity_state() const {
  std::vector<double> values;
  values.reserve(u.size() + v.size());
  values.insert(values.end(), u.begin(), u.end());
  values.insert(values.end(), v.begin(), v.end());
  return State(std::move(values), {FieldShape{nx - 1, ny}, FieldShape{nx, ny - 1}});
}

ProjectionSolver::ProjectionSolver(NsProblem problem)
    : problem_(problem), impl_(std::make_unique<Impl>()) {
  problem_.validate();
  const std::size_t nx = problem_.nx;
  const std::size_t ny = problem_.ny;
  const double nu_dt = problem_.dt / problem_.re;

  impl_->viscous_u.compute(
      assemble_2d(nx - 1, ny, problem_.hx(), problem_.hy(), 2.0, 3.0, 1.0, nu_dt));
  impl_->viscous_v.compute(
      assemble_2d(nx, ny - 1, problem_.hx(), problem_.hy(), 3.0, 2.0, 1.0, nu_dt));

  const SpMat lp = assemble_2d(nx, ny, problem_.hx(), problem_.hy(), 1.0, 1.0, 0.0, 1.0);
  const int n = static_cast<int>(nx * ny);
  const SpMat reduced = lp.bottomRightCorner(n - 1, n - 1);
  impl_->pressure.compute(reduced);
  impl_->pressure_unknowns = static_cast<std::size_t>(n - 1);

  if (impl_->viscous_u.info() != Eigen::Success || impl_->viscous_v.info() != Eigen::Success ||
      impl_->pressure.info() != Eigen::Success) {
    throw SolverFailure("ns: factorization of the implicit operators failed");
  }
}

ProjectionSolver::~ProjectionSolver() = default;
ProjectionSolver::ProjectionSolver(ProjectionSolver&&) noexcept = default;
ProjectionSolver& ProjectionSolver::operator=(ProjectionSolver&&) noexcept = default;

std::size_t ProjectionSolver::poisson_unknowns() const { return impl_->pressure_unknowns; }

NsFields ProjectionSolver::step(const NsFields& in, std::size_t step_index,
                                FaultHook* hook) const {
  const std::size_t nx = problem_.nx;
  const std::size_t ny = problem_.ny;
  const double hx = problem_.hx();
  const double hy = problem_.hy();
  const double dt = problem_.dt;
  const double lid = problem_.lid_velocity;

  if (in.nx != nx || in.ny != ny) throw ConfigError("ns: field dimensions do not match problem");

  auto U = [&](std::size_t i, std::size_t j) { return in.u[i + j * (nx - 1)]; };
  auto V = [&](std::size_t i, std::size_t j) { return in.v[i + j * nx]; };

  // Extended U with wall values in x and ghost values in y: (nx+1) x (ny+2).
  const std::size_t ue_rows = nx + 1;
  std::vector<double> ue(ue_rows * (ny + 2), 0.0);
  auto Ue = [&](std::size_t I, std::size_t J) -> double& { return ue[I + J * ue_rows]; };
  for (std::size_t J = 1; J <= ny; ++J) {
    for (std::size_t I = 1; I < nx; ++I) Ue(I, J) = U(I - 1, J - 1);
  }
  for (std::size_t I = 0; I <= nx; ++I) {
    Ue(I, 0) = -Ue(I, 1);
    Ue(I, ny + 1) = 2.0 * lid - Ue(I, ny);
  }

  // Extended V with wall values in y and ghost values in x: (nx+2) x (ny+1).
  const std::size_t ve_rows = nx + 2;
  std::vector<double> ve(ve_rows * (ny + 1), 0.0);
  auto Ve = [&](std::size_t I, std::size_t J) -> double& { return ve[I + J * ve_rows]; };
  for (std::size_t J = 1; J < ny; ++J) {
    for (std::size_t I = 1; I <= nx; ++I) Ve(I, J) = V(I - 1, J - 1);
  }
  for (std::size_t J = 0; J <= ny; ++J) {
    Ve(0, J) = -Ve(1, J);
    Ve(nx + 1, J) = -Ve(nx, J);
  }

  double gamma = 0.0;
  if (problem_.upwind_blend) {
    gamma = std::min(1.2 * dt * std::max(max_abs(in.u) / hx, max_abs(in.v) / hy), 1.0);
  }

  // Cross term uv at cell corners: (nx+1) x (ny+1).
  const std::size_t c_rows = nx + 1;
  std::vector<double> flux_x(c_rows * (ny + 1));
  std::vector<double> flux_y(c_rows * (ny + 1));
  for (std::size_t J = 0; J <= ny; ++J) {
    for (std::size_t I = 0; I <= nx; ++I) {
      const double ua = 0.5 * (Ue(I, J) + Ue(I, J + 1));
      const double ud = 0.5 * (Ue(I, J + 1) - Ue(I, J));
      const double va = 0.5 * (Ve(I, J) + Ve(I + 1, J));
      const double vd = 0.5 * (Ve(I + 1, J) - Ve(I, J));
      flux_x[I + J * c_rows] = ua * va - gamma * std::abs(ua) * vd;
      flux_y[I + J * c_rows] = ua * va - gamma * ud * std::abs(va);
    }
  }

  // Intermediate velocity after the explicit advective update.
  std::vector<double> u_star(in.u.size());
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      auto sq = [&](std::size_t c) {
        const double a = 0.5 * (Ue(c, j + 1) + Ue(c + 1, j + 1));
        const double d = 0.5 * (Ue(c + 1, j + 1) - Ue(c, j + 1));
        return a * a - gamma * std::abs(a) * d;
      };
      const double u2x = (sq(i + 1) - sq(i)) / hx;
      const double uvy = (flux_y[(i + 1) + (j + 1) * c_rows] - flux_y[(i + 1) + j * c_rows]) / hy;
      u_star[i + j * (nx - 1)] = U(i, j) - dt * (uvy + u2x);
    }
  }
  std::vector<double> v_star(in.v.size());
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      auto sq = [&](std::size_t c) {
        const double a = 0.5 * (Ve(i + 1, c) + Ve(i + 1, c + 1));
        const double d = 0.5 * (Ve(i + 1, c + 1) - Ve(i + 1, c));
        return a * a - gamma * std::abs(a) * d;
      };
      const double v2y = (sq(j + 1) - sq(j)) / hy;
      const double uvx = (flux_x[(i + 1) + (j + 1) * c_rows] - flux_x[i + (j + 1) * c_rows]) / hx;
      v_star[i + j * nx] = V(i, j) - dt * (uvx + v2y);
    }
  }

  // Implicit viscosity; the lid enters through the top ghost row of U.
  const double nu_dt = dt / problem_.re;
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    u_star[i + (ny - 1) * (nx - 1)] += nu_dt * 2.0 * lid / (hy * hy);
  }
  Eigen::Map<const Eigen::VectorXd> u_rhs(u_star.data(), static_cast<Eigen::Index>(u_star.size()));
  Eigen::Map<const Eigen::VectorXd> v_rhs(v_star.data(), static_cast<Eigen::Index>(v_star.size()));
  const Eigen::VectorXd u_ss = impl_->viscous_u.solve(u_rhs);
  const Eigen::VectorXd v_ss = impl_->viscous_v.solve(v_rhs);

  auto Uss = [&](std::size_t I, std::size_t j) {
    return (I == 0 || I == nx) ? 0.0 : u_ss(static_cast<Eigen::Index>((I - 1) + j * (nx - 1)));
  };
  auto Vss = [&](std::size_t i, std::size_t J) {
    return (J == 0 || J == ny) ? 0.0 : v_ss(static_cast<Eigen::Index>(i + (J - 1) * nx));
  };

  // Pressure Poisson: lap(P) = div(U**) / dt, unknown (0, 0) pinned to zero.
  const std::size_t np = nx * ny;
  std::vector<double> poisson_rhs(np - 1);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t c = i + j * nx;
      if (c == 0) continue;
      const double div = (Uss(i + 1, j) - Uss(i, j)) / hx + (Vss(i, j + 1) - Vss(i, j)) / hy;
      poisson_rhs[c - 1] = div / dt;
    }
  }
  if (hook != nullptr) hook->on_linear_rhs(step_index, poisson_rhs);
  Eigen::Map<const Eigen::VectorXd> p_rhs(poisson_rhs.data(),
                                          static_cast<Eigen::Index>(poisson_rhs.size()));
  // The assembled operator is the negative Laplacian.
  const Eigen::VectorXd p_reduced = impl_->pressure.solve(-p_rhs);
  if (impl_->pressure.info() != Eigen::Success) {
    throw SolverFailure("ns: pressure solve failed at step " + std::to_string(step_index));
  }

  NsFields out = NsFields::zeros(nx, ny);
  out.p[0] = 0.0;
  for (std::size_t c = 1; c < np; ++c) out.p[c] = p_reduced(static_cast<Eigen::Index>(c - 1));

  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const double dpdx = (out.p[(i + 1) + j * nx] - out.p[i + j * nx]) / hx;
      out.u[i + j * (nx - 1)] = Uss(i + 1, j) - dt * dpdx;
    }
  }
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double dpdy = (out.p[i + (j + 1) * nx] - out.p[i + j * nx]) / hy;
      out.v[i + j * nx] = Vss(i, j + 1) - dt * dpdy;
    }
  }
  return out;
}

NsFields projection_step(const ProjectionSolver& solver, const NsFields& fields) {
  return solver.step(fields, 0, nullptr);
}

double divergence_norm(const NsProblem& problem, const NsFields& f) {
  const std::size_t nx = problem.nx;
  const std::size_t ny = problem.ny;
  auto u_face = [&](std::size_t I, std::size_t j) {
    return (I == 0 || I == nx) ? 0.0 : f.u[(I - 1) + j * (nx - 1)];
  };
  auto v_face = [&](std::size_t i, std::size_t J) {
    return (J == 0 || J == ny) ? 0.0 : f.v[i + (J - 1) * nx];
  };
  double m = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double div = (u_face(i + 1, j) - u_face(i, j)) / problem.hx() +
                         (v_face(i, j + 1) - v_face(i, j)) / problem.hy();
      m = std::max(m, std::abs(div));
    }
  }
  return m;
}

NsPairResult ns_pair_step(const ProjectionSolver& solver, const NsFields& prev,
                          const NsFields* prev2, std::size_t step, FaultHook* hook,
                          bool with_aux) {
  NsPairResult result;
  result.fields = solver.step(prev, step, hook);
  result.output.step_index = step;
  result.output.base = result.fields.velocity_state();
  if (with_aux && prev2 != nullptr) {
    result.output.auxiliary =
        ode::extrapolation_aux(prev.velocity_state(), prev2->velocity_state());
  }
  return result;
}

NsPairStepper::NsPairStepper(NsProblem problem)
    : solver_(problem), grid_(problem.grid()),
      fields_(NsFields::zeros(problem.nx, problem.ny)),
      current_state_(fields_.velocity_state()) {}

StepOutput NsPairStepper::step(FaultHook* hook) {
  const std::size_t k = taken_ + 1;
  if (hook != nullptr) {
    const std::array<std::span<double>, 1> entries{std::span<double>(fields_.u)};
    hook->on_stored_data(k, entries);
  }
  NsPairResult r =
      ns_pair_step(solver_, fields_, k >= 2 ? &prev_fields_ : nullptr, k, hook,
                   auxiliary_enabled());
  prev_fields_ = std::move(fields_);
  fields_ = std::move(r.fields);
  current_state_ = r.output.base;
  taken_ = k;
  return std::move(r.output);
}

std::optional<FaultTargets> NsPairStepper::fault_targets(FaultMode mode) const {
  switch (mode) {
    case FaultMode::kPreviousSolution: return FaultTargets{1, fields_.u.size()};
    case FaultMode::kLinearRhs: return FaultTargets{1, solver_.poisson_unknowns()};
    case FaultMode::kDerivativeEval: return std::nullopt;
  }
  return std::nullopt;
}

NsProblem driven_cavity(double re) {
  NsProblem p;
  p.re = re;
  p.nx = 40;
  p.ny = 40;
  p.dt = 1.0 / 100.0;
  p.t_end = 2.0;
  p.lid_velocity = 1.0;
  p.validate();
  return p;
}

}  // namespace abcheck::ns
