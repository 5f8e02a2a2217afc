#include "abcheck/tridiagonal.hpp"

#include <cmath>
#include <string>

#include "abcheck/core.hpp"

namespace abcheck {

void solve_tridiagonal(std::span<const double> sub, std::span<const double> main,
                       std::span<const double> super, std::span<const double> rhs,
                       std::span<double> x) {
  const std::size_t n = main.size();
  if (sub.size() != n || super.size() != n || rhs.size() != n || x.size() != n) {
    throw ConfigError("solve_tridiagonal: diagonals and right-hand side differ in length");
  }
  if (n == 0) return;

  std::vector<double> c_star(n);
  auto pivot_ok = [](double m) { return m != 0.0 && std::isfinite(m); };

  double m = main[0];
  if (!pivot_ok(m)) throw SolverFailure("solve_tridiagonal: zero pivot in row 0");
  c_star[0] = super[0] / m;
  x[0] = rhs[0] / m;
  for (std::size_t i = 1; i < n; ++i) {
    m = main[i] - sub[i] * c_star[i - 1];
    if (!pivot_ok(m)) {
      throw SolverFailure("solve_tridiagonal: zero pivot in row " + std::to_string(i));
    }
    c_star[i] = super[i] / m;
    x[i] = (rhs[i] - sub[i] * x[i - 1]) / m;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c_star[i] * x[i + 1];
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& system) {
  std::vector<double> x(system.main.size());
  solve_tridiagonal(system.sub, system.main, system.super, system.rhs, x);
  return x;
}

}  // namespace abcheck
