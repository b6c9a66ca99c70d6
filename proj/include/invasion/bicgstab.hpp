/// @file bicgstab.hpp
/// @brief Matrix-free BiCGSTAB for the implicit c2 stage systems.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace invasion {

struct LinearOperator {
  std::size_t n = 0;
  /// out = A x; `out` never aliases `x`.
  std::function<void(std::span<const double> x, std::span<double> out)> apply;
  /// Optional diagonal of A, used by the Jacobi preconditioner.
  std::vector<double> diagonal;
};

struct SolverOptions {
  double rel_tol = 1e-10;
  double abs_floor = 1e-14;
  std::size_t max_iter = 1000;
  bool jacobi = false;
};

struct SolveReport {
  std::size_t iterations = 0;
  /// ||b - A x||_2 recomputed from scratch at exit.
  double final_residual = 0.0;
  bool converged = false;
  bool breakdown = false;
  std::size_t restarts = 0;
};

/// Solves A x = b. `x` holds the initial guess on entry and the iterate on
/// exit. Convergence means ||b - A x|| <= max(rel_tol*||b||, abs_floor). On a
/// breakdown (rho or omega numerically zero) the iteration restarts once from
/// the current iterate; a second breakdown ends the solve with
/// `breakdown = true`. Exceeding max_iter yields a nonconverged report.
SolveReport bicgstab(const LinearOperator& op, std::span<const double> b, std::span<double> x,
                     const SolverOptions& options = {});

}  // namespace invasion
