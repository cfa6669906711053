#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "holepoint/error.hpp"
#include "holepoint/green.hpp"

namespace holepoint {
namespace {

constexpr double kPi = std::numbers::pi;

VecN random_point(std::mt19937_64& rng, int N, double rmin, double rmax) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> radius(rmin, rmax);
  VecN x(static_cast<std::size_t>(N));
  for (double& v : x) v = gauss(rng);
  const double scale = radius(rng) / norm(x);
  for (double& v : x) v *= scale;
  return x;
}

VecN scaled(const VecN& x, double t) {
  VecN y = x;
  for (double& v : y) v *= t;
  return y;
}

TEST(Kernels, UnitBallVolumes) {
  EXPECT_NEAR(KernelContext(2).omega, kPi, 1e-15);
  EXPECT_NEAR(KernelContext(3).omega, 4.0 * kPi / 3.0, 1e-15);
  // Gamma-function closed form for the rest.
  for (int N = 2; N <= 6; ++N) {
    EXPECT_NEAR(unit_ball_volume(N), std::pow(kPi, 0.5 * N) / std::tgamma(0.5 * N + 1.0), 1e-14);
  }
  EXPECT_THROW(KernelContext(7), Error);
}

TEST(G0, VanishesOnUnitSphere) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const VecN z = random_point(rng, 3, 1.0, 1.0);
    EXPECT_NEAR(g0({2.0, 0.0, 0.0}, z, 3), 0.0, 1e-14);
  }
}

TEST(G0, HandValueInThreeDimensions) {
  // ||w| z - w/|w|| = |2 (3,0,0) - (1,0,0)| = 5, |w - z| = 1.
  const double expected = (1.0 / (4.0 * kPi)) * (1.0 - 1.0 / 5.0);
  EXPECT_NEAR(g0({2.0, 0.0, 0.0}, {3.0, 0.0, 0.0}, 3), expected, 1e-12);
  EXPECT_NEAR(expected, 0.0636619, 1e-7);
}

TEST(G0, SymmetricAndPositive) {
  std::mt19937_64 rng(11);
  for (int N : {2, 3, 4}) {
    for (int k = 0; k < 100; ++k) {
      const VecN w = random_point(rng, N, 1.0 + 1e-9, 5.0);
      const VecN z = random_point(rng, N, 1.0 + 1e-9, 5.0);
      const double a = g0(w, z, N);
      const double b = g0(z, w, N);
      EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
      EXPECT_GT(a, 0.0);
    }
  }
}

TEST(G0, RejectsPointsInsideTheBall) {
  try {
    g0({0.5, 0.0}, {2.0, 0.0}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainViolation);
  }
  EXPECT_THROW(g0({2.0, 0.0}, {2.0, 0.0, 0.0}, 2), Error);
}

TEST(G0Normal, MatchesDirectionalDifference) {
  std::mt19937_64 rng(3);
  const double delta = 1e-6;
  for (int N : {2, 3, 4}) {
    for (int k = 0; k < 50; ++k) {
      const VecN w = random_point(rng, N, 1.2, 4.0);
      const VecN z = random_point(rng, N, 1.0, 1.0);
      // One-sided second-order difference along z, i.e. against nu_z = -z.
      const double g1 = g0(w, scaled(z, 1.0 + delta), N);
      const double g2 = g0(w, scaled(z, 1.0 + 2.0 * delta), N);
      const double outward = (4.0 * g1 - g2 - 3.0 * g0(w, z, N)) / (2.0 * delta);
      const double formula = g0_normal_derivative(w, z, N);
      EXPECT_NEAR(-outward, formula, 1e-5 * std::abs(formula));
    }
  }
}

TEST(G0Normal, HandValueAndLimit) {
  EXPECT_NEAR(g0_normal_derivative({2.0, 0.0}, {1.0, 0.0}, 2), -3.0 / (2.0 * kPi), 1e-15);
  EXPECT_NEAR(-3.0 / (2.0 * kPi), -0.477464, 1e-6);
  const double near = g0_normal_derivative({1.0 + 1e-9, 0.0}, {0.0, 1.0}, 2);
  EXPECT_LT(std::abs(near), 1e-9);
  EXPECT_THROW(g0_normal_derivative({2.0, 0.0}, {0.5, 0.0}, 2), Error);
}

QuadraticPolynomial constant(int N) {
  return {1.0, VecN(static_cast<std::size_t>(N), 0.0), VecN(static_cast<std::size_t>(N * N), 0.0)};
}

QuadraticPolynomial first_coordinate(int N) {
  QuadraticPolynomial p = constant(N);
  p.c = 0.0;
  p.b[0] = 1.0;
  return p;
}

QuadraticPolynomial squared_norm(int N) {
  QuadraticPolynomial p = constant(N);
  p.c = 0.0;
  for (int i = 0; i < N; ++i) p.a[static_cast<std::size_t>(i * N + i)] = 1.0;
  return p;
}

TEST(PoissonIdentity, ConstantHasUnitKernelMass) {
  EXPECT_LE(poisson_identity_check(constant(2), {0.0, 0.0}, 2), 1e-8);
  EXPECT_LE(poisson_identity_check(constant(2), {0.5, 0.4}, 2), 1e-8);
  EXPECT_LE(poisson_identity_check(constant(3), {0.0, 0.3, -0.4}, 3), 1e-8);
}

TEST(PoissonIdentity, HarmonicLinear) {
  EXPECT_LE(poisson_identity_check(first_coordinate(2), {0.3, -0.2}, 2), 1e-8);
  EXPECT_LE(poisson_identity_check(first_coordinate(3), {0.1, 0.2, 0.3}, 3), 1e-8);
}

TEST(PoissonIdentity, SquaredNorm) {
  EXPECT_LE(poisson_identity_check(squared_norm(2), {0.0, 0.0}, 2), 1e-6);
  EXPECT_LE(poisson_identity_check(squared_norm(2), {0.4, 0.3}, 2), 1e-6);
  EXPECT_LE(poisson_identity_check(squared_norm(3), {0.2, 0.0, 0.1}, 3), 1e-6);
}

TEST(PoissonIdentity, GeneralQuadratic) {
  QuadraticPolynomial p{0.5, {0.2, -1.0}, {1.5, 0.3, 0.3, -0.4}};
  EXPECT_LE(poisson_identity_check(p, {-0.2, 0.6}, 2), 1e-6);
}

TEST(PoissonIdentity, RejectsOutsidePoint) {
  EXPECT_THROW(poisson_identity_check(constant(2), {1.0, 0.0}, 2), Error);
  EXPECT_THROW(poisson_identity_check(constant(4), {0.0, 0.0, 0.0, 0.0}, 4), Error);
}

TEST(DiscGreen, RegularPartAtTheHoleCentre) {
  const Vec2 P{0.3, 0.0};
  EXPECT_NEAR(disc_regular_part(P, P), std::log(1.0 - 0.09) / (2.0 * kPi), 1e-15);
  // H(., P) is harmonic with boundary values -S(., P); its value at P is
  // the Poisson integral of that data.
  double integral = 0.0;
  const int m = 4096;
  for (int k = 0; k < m; ++k) {
    const double t = 2.0 * kPi * k / m;
    const Vec2 y{std::cos(t), std::sin(t)};
    const double kernel = (1.0 - dot(P, P)) / (2.0 * kPi * dot(P - y, P - y));
    integral += kernel * -fundamental_solution(y, P) * 2.0 * kPi / m;
  }
  EXPECT_NEAR(disc_regular_part(P, P), integral, 1e-13);
  EXPECT_LT(disc_regular_part(P, P), 0.0);
}

TEST(DiscGreen, VanishesOnCircleAndSplits) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const VecN a = random_point(rng, 2, 0.0, 0.95);
    const VecN b = random_point(rng, 2, 0.0, 0.95);
    const Vec2 x{a[0], a[1]}, y{b[0], b[1]};
    const double g = disc_green(x, y);
    EXPECT_NEAR(g, disc_green(y, x), 1e-12 * std::abs(g));
    EXPECT_NEAR(g, fundamental_solution(x, y) + disc_regular_part(x, y), 1e-14);
    EXPECT_GT(g, 0.0);
    const VecN c = random_point(rng, 2, 1.0, 1.0);
    EXPECT_NEAR(disc_green(x, {c[0], c[1]}), 0.0, 1e-14);
  }
  EXPECT_THROW(disc_green({1.5, 0.0}, {0.0, 0.0}), Error);
}

TEST(PsiEps, DeviationDecaysWithEps) {
  const PsiReport coarse = psi_eps_verify({0.3, 0.0}, 0.04, 0.01);
  const PsiReport fine = psi_eps_verify({0.3, 0.0}, 0.02, 0.005);
  EXPECT_EQ(coarse.probes, 64u);
  EXPECT_LT(fine.max_deviation, coarse.max_deviation);
  EXPECT_LT(coarse.max_deviation, 0.05);
}

}  // namespace
}  // namespace holepoint
