#include <chrono>
#include <cmath>
#include <optional>

#include <gtest/gtest.h>

#include "holepoint/error.hpp"
#include "holepoint/radial.hpp"

namespace holepoint {
namespace {

// Exact annulus torsion radii.
double exact_r2(double eps) { return std::sqrt((1.0 - eps * eps) / (2.0 * std::abs(std::log(eps)))); }
double exact_r3(double eps) { return std::cbrt(eps * (1.0 + eps) / 2.0); }

TEST(Radial, TorsionPlaneMatchesExact) {
  const auto t0 = std::chrono::steady_clock::now();
  const RadialSolution sol = solve_radial({2, 1e-3, Nonlinearity::torsion(), 20000});
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_NEAR(sol.r_eps, exact_r2(1e-3), 1e-5);
  EXPECT_LT(seconds, 5.0);
  EXPECT_LE(sol.residual, 1e-11);
}

TEST(Radial, TorsionSpaceMatchesExact) {
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const RadialSolution sol = solve_radial({3, eps, Nonlinearity::torsion()});
    EXPECT_NEAR(sol.r_eps, exact_r3(eps), 1e-5) << eps;
  }
}

TEST(Radial, EndpointsVanish) {
  const RadialSolution sol = solve_radial({3, 0.05, Nonlinearity::torsion(), 4000});
  EXPECT_EQ(sol.u.front(), 0.0);
  EXPECT_EQ(sol.u.back(), 0.0);
  EXPECT_EQ(sol.r.front(), 0.05);
  EXPECT_EQ(sol.r.back(), 1.0);
  for (std::size_t k = 1; k + 1 < sol.u.size(); ++k) ASSERT_GT(sol.u[k], 0.0);
}

TEST(Radial, SingleCriticalRadius) {
  const auto nl = Nonlinearity::custom([](double s) { return 1.0 + 0.1 * s; },
                                       [](double) { return 0.1; });
  for (int N : {2, 3, 5}) {
    const RadialSolution sol = solve_radial({N, 0.01, nl, 20000});
    EXPECT_EQ(sol.sign_changes, 1) << N;
    EXPECT_GT(sol.r_eps, 0.01);
    EXPECT_LT(sol.r_eps, 1.0);
  }
}

TEST(Radial, NegativeSourceHasNoMaximum) {
  const auto nl = Nonlinearity::custom([](double) { return -1.0; }, [](double) { return 0.0; });
  try {
    solve_radial({2, 0.1, nl, 2000});
    FAIL() << "expected NoSignChange";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoSignChange);
  }
}

TEST(Radial, RejectsBadInput) {
  auto code_of = [](RadialProblem rp) -> std::optional<ErrorCode> {
    try {
      solve_radial(rp);
    } catch (const Error& e) {
      return e.code();
    }
    return std::nullopt;
  };
  EXPECT_EQ(code_of({1, 0.1}), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of({2, 0.0}), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of({2, 1.0}), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of({2, 0.1, Nonlinearity::torsion(), 100}), ErrorCode::InvalidArgument);
  // dr comparable to eps.
  EXPECT_EQ(code_of({3, 1e-4, Nonlinearity::torsion(), 1000}), ErrorCode::InvalidArgument);
}

TEST(Radial, MeshConvergenceOrder) {
  const double eps = 0.01;
  const double r1 = solve_radial({3, eps, Nonlinearity::torsion(), 1000}).r_eps;
  const double r2 = solve_radial({3, eps, Nonlinearity::torsion(), 2000}).r_eps;
  const double r4 = solve_radial({3, eps, Nonlinearity::torsion(), 4000}).r_eps;
  const double order = std::log2(std::abs(r1 - r2) / std::abs(r2 - r4));
  EXPECT_GE(order, 1.8);
}

TEST(Radial, BallCentreTorsion) {
  for (int N : {2, 3, 4}) {
    EXPECT_NEAR(solve_radial_ball_centre(N, Nonlinearity::torsion()), 1.0 / (2.0 * N), 1e-9) << N;
  }
}

TEST(RadialSweep, SpaceRatioConverges) {
  const auto entries = radial_sweep(3, {1e-2, 1e-3, 1e-4, 1e-5}, Nonlinearity::torsion());
  ASSERT_EQ(entries.size(), 4u);
  const double limit = std::cbrt(0.5);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    ASSERT_TRUE(entries[k].error.empty()) << entries[k].error;
    EXPECT_NEAR(entries[k].pred_printed, limit * std::cbrt(entries[k].eps), 1e-6);
    if (k > 0) {
      EXPECT_LT(std::abs(entries[k].ratio_to_law - limit),
                std::abs(entries[k - 1].ratio_to_law - limit));
    }
  }
  EXPECT_NEAR(entries.back().ratio_to_law / limit, 1.0, 0.02);
}

TEST(RadialSweep, FourDimensionalCoefficient) {
  const auto entries = radial_sweep(4, {1e-4}, Nonlinearity::torsion());
  ASSERT_TRUE(entries[0].error.empty());
  EXPECT_NEAR(entries[0].ratio_to_law, 1.0, 0.05);
}

TEST(RadialSweep, PlaneFollowsCrossConstant) {
  const auto entries = radial_sweep(2, {1e-2, 1e-3, 1e-4}, Nonlinearity::torsion());
  for (const auto& e : entries) {
    ASSERT_TRUE(e.error.empty());
    const double scale = 1.0 / std::sqrt(std::abs(std::log(e.eps)));
    EXPECT_NEAR(e.pred_cross, std::sqrt(0.5) * scale, 1e-6);
    EXPECT_NEAR(e.pred_printed, std::sqrt(0.125) * scale, 1e-6);
    EXPECT_NEAR(e.r_eps, e.pred_cross, 1e-3);
  }
  EXPECT_NEAR(entries.back().ratio_to_law, std::sqrt(0.5), 1e-3);
}

TEST(RadialSweep, FailuresStayPerEntry) {
  const auto nl = Nonlinearity::custom([](double) { return -1.0; }, [](double) { return 0.0; });
  const auto entries = radial_sweep(3, {0.1, 0.05}, nl, 2000);
  ASSERT_EQ(entries.size(), 2u);
  for (const auto& e : entries) {
    EXPECT_FALSE(e.error.empty());
    EXPECT_TRUE(std::isnan(e.r_eps));
  }
}

TEST(RadialSweep, RejectsIncreasingEps) {
  EXPECT_THROW(radial_sweep(3, {1e-3, 1e-2}, Nonlinearity::torsion()), Error);
}

}  // namespace
}  // namespace holepoint
