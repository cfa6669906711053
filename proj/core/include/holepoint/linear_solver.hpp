#pragma once

#include <cstddef>
#include <vector>

#include "holepoint/geometry.hpp"

namespace holepoint {

struct LinearSolveOptions {
  double rtol = 1e-10;
  /// 0 selects the default cap of 20 * sqrt(unknowns).
  std::size_t max_iterations = 0;
  /// Consecutive residual increases in CG before switching to BiCGStab.
  int fallback_after = 3;
};

struct LinearSolveReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool switched_to_bicgstab = false;
};

/// Solves (op + diag(shift)) x = b with Jacobi-preconditioned CG, falling
/// back to BiCGStab from the current iterate when the CG residual rises
/// fallback_after times in a row. shift may be empty. x holds the initial
/// guess on entry. Convergence is ||D^-1 r|| <= rtol ||D^-1 b|| with D the
/// diagonal of the system. Throws NoConvergence when the iteration cap is reached.
LinearSolveReport solve_linear(const SparseOperator& op, const std::vector<double>& shift,
                               const std::vector<double>& b, std::vector<double>& x,
                               const LinearSolveOptions& options = {});

}  // namespace holepoint
