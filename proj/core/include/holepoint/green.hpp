#pragma once

#include <cstddef>

#include "holepoint/vec.hpp"

namespace holepoint {

/// Dimension-dependent constants for the kernels below (2 <= N <= 6).
struct KernelContext {
  explicit KernelContext(int dimension);

  int N;
  /// Volume of the unit ball in R^N.
  double omega;
};

/// Volume of the unit ball in R^N, tabulated for N in 2..6.
double unit_ball_volume(int N);

/// Green function of the exterior of the unit ball, zero on the unit sphere.
/// Throws DomainViolation if |w| < 1 or |z| < 1 and InvalidArgument on a
/// dimension mismatch or w == z.
double g0(const VecN& w, const VecN& z, int N);

/// Normal derivative of g0 in z at |z| = 1 along nu_z = -z, for |w| > 1.
double g0_normal_derivative(const VecN& w, const VecN& z, int N);

/// Dirichlet Green function of the unit ball. Same closed form as g0, with
/// both points in the closed ball.
double ball_green(const VecN& s, const VecN& y, int N);

/// Poisson kernel of the unit ball, (1 - |s|^2) / (N omega_N |s - y|^N).
double poisson_kernel(const VecN& s, const VecN& y, int N);

/// phi(x) = c + b.x + x^T A x with A symmetric (row-major, N x N).
struct QuadraticPolynomial {
  double c = 0.0;
  VecN b;
  VecN a;

  int dimension() const { return static_cast<int>(b.size()); }
  double operator()(const VecN& x) const;
  double laplacian() const;
};

/// |phi(s) - (Poisson integral of phi - integral of Laplace(phi) G)| over
/// the unit ball, N in {2, 3}. Throws QuadratureFailure when a rule does
/// not settle to its tolerance.
double poisson_identity_check(const QuadraticPolynomial& phi, const VecN& s, int N);

/// Fundamental solution -log|x - y| / (2 pi).
double fundamental_solution(Vec2 x, Vec2 y);

/// Green function of the unit disc by the method of images.
double disc_green(Vec2 x, Vec2 y);

/// Harmonic part H = G - S of the disc Green function; defined for x == y.
double disc_regular_part(Vec2 x, Vec2 y);

struct PsiReport {
  double eps = 0.0;
  double h = 0.0;
  /// Max |psi - (1 + 2 pi G(x, P) / log eps)| on the probe circle.
  double max_deviation = 0.0;
  double probe_radius = 0.0;
  std::size_t probes = 0;
};

/// Solves the harmonic problem on the unit disc minus B(P, eps) with data 1
/// outside and 0 on the hole, and compares it with its expansion on the
/// circle |x - P| = 0.2.
PsiReport psi_eps_verify(Vec2 P, double eps, double h);

}  // namespace holepoint
