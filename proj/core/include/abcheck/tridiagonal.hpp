#pragma once

#include <span>
#include <vector>

namespace abcheck {

/// Tridiagonal system A x = rhs. sub[0] and super[n-1] are ignored.
struct TridiagonalSystem {
  std::vector<double> sub;
  std::vector<double> main;
  std::vector<double> super;
  std::vector<double> rhs;
};

/// Thomas algorithm without pivoting; intended for diagonally dominant
/// systems. Throws SolverFailure on a zero or non-finite pivot.
[[nodiscard]] std::vector<double> solve_tridiagonal(const TridiagonalSystem& system);

/// Same elimination for a fixed matrix and a caller-supplied right-hand side.
void solve_tridiagonal(std::span<const double> sub, std::span<const double> main,
                       std::span<const double> super, std::span<const double> rhs,
                       std::span<double> x);

}  // namespace abcheck
