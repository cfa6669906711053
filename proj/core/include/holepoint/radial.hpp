#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "holepoint/elliptic.hpp"
#include "holepoint/vec.hpp"

namespace holepoint {

/// Radial problem -u'' - (N-1) u'/r = f(u) on eps < r < 1, u(eps) = u(1) = 0.
struct RadialProblem {
  int N = 2;
  double eps = 0.01;
  Nonlinearity nl = Nonlinearity::torsion();
  /// Number of uniform intervals; 0 selects default_radial_mesh(eps).
  std::size_t n = 0;
};

/// max(20000, min(2e6, ceil(20 / eps))): keeps about twenty cells across the
/// inner radius.
std::size_t default_radial_mesh(double eps);

struct RadialSolution {
  VecN r;
  VecN u;
  /// Fourth-order finite differences of u.
  VecN du;
  /// Root of u' where it turns from positive to negative.
  double r_eps = 0.0;
  /// Descending sign changes of u' seen on the mesh.
  int sign_changes = 0;
  int newton_iterations = 0;
  /// Sup norm of the diagonally scaled discrete residual.
  double residual = 0.0;
};

/// Damped Newton with a tridiagonal (Thomas) solve per step. Throws
/// NewtonStalled, NoConvergence, or NoSignChange when u' never turns from
/// positive to negative.
RadialSolution solve_radial(const RadialProblem& rp);

/// u(0) for the same equation on the whole unit ball (u'(0) = 0, u(1) = 0).
double solve_radial_ball_centre(int N, const Nonlinearity& nl, std::size_t n = 20000);

struct RadialSweepEntry {
  double eps = 0.0;
  double r_eps = 0.0;
  /// r_eps / eps^((N-2)/N) for N >= 3, r_eps sqrt|log eps| for N = 2.
  double ratio_to_law = 0.0;
  double pred_printed = 0.0;
  double pred_cross = 0.0;
  int newton_iterations = 0;
  /// Empty on success, otherwise "Code: message" of the failure.
  std::string error;
};

/// One solve and prediction per eps. Failures are recorded per entry.
/// Throws InvalidArgument unless eps_list is strictly decreasing.
std::vector<RadialSweepEntry> radial_sweep(int N, const std::vector<double>& eps_list,
                                           const Nonlinearity& nl, std::size_t n = 0);

}  // namespace holepoint
