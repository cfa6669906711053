#include "holepoint/green.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "holepoint/elliptic.hpp"
#include "holepoint/error.hpp"
#include "holepoint/geometry.hpp"

namespace holepoint {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadratureTolerance = 1e-13;
// Rounding allowance for points placed on the unit sphere.
constexpr double kSlack = 1e-12;

void check_dimension(int N) {
  if (N < 2 || N > 6) {
    throw Error(ErrorCode::InvalidArgument, "dimension must be in 2..6, got " + std::to_string(N));
  }
}

void check_points(const VecN& a, const VecN& b, int N) {
  check_dimension(N);
  if (static_cast<int>(a.size()) != N || static_cast<int>(b.size()) != N) {
    throw Error(ErrorCode::InvalidArgument, "point dimension does not match N");
  }
}

double distance2(const VecN& a, const VecN& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Shared closed form of g0 and the ball Green function. The image distance
// ||w| z - w / |w||^2 is written as |w|^2 |z|^2 - 2 w.z + 1, which stays
// finite at w = 0.
double image_kernel(const VecN& w, const VecN& z, int N) {
  const double d2 = distance2(w, z);
  if (d2 == 0.0) throw Error(ErrorCode::InvalidArgument, "kernel evaluated on the diagonal");
  const double img2 = dot(w, w) * dot(z, z) - 2.0 * dot(w, z) + 1.0;
  if (N == 2) return -(std::log(d2) - std::log(img2)) / (4.0 * kPi);
  const double p = 0.5 * (N - 2);
  return (std::pow(d2, -p) - std::pow(img2, -p)) / (N * (N - 2) * unit_ball_volume(N));
}

// Integral of g over the unit sphere S^{N-1}, N in {2, 3}. For N = 3 the
// polar axis is e3, so integrands concentrated around e3 are resolved by
// the adaptive rule in the polar angle.
double sphere_integral(int N, const std::array<VecN, 3>& frame,
                       const std::function<double(const VecN&)>& g) {
  auto trapezoid = [](const std::function<double(double)>& per_angle) {
    double previous = 0.0;
    for (int m = 64; m <= (1 << 16); m *= 2) {
      double sum = 0.0;
      for (int k = 0; k < m; ++k) sum += per_angle(2.0 * kPi * k / m);
      const double value = sum * 2.0 * kPi / m;
      if (m > 64 && std::abs(value - previous) <= kQuadratureTolerance * std::max(1.0, std::abs(value))) {
        return value;
      }
      previous = value;
    }
    throw Error(ErrorCode::QuadratureFailure, "trapezoid rule on the circle did not settle");
  };

  if (N == 2) {
    return trapezoid([&](double theta) { return g(VecN{std::cos(theta), std::sin(theta)}); });
  }
  const auto& [e1, e2, e3] = frame;
  return trapezoid([&](double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    auto along = [&](double theta) {
      const double st = std::sin(theta), ct = std::cos(theta);
      VecN y(3);
      for (int i = 0; i < 3; ++i) y[i] = st * (c * e1[i] + s * e2[i]) + ct * e3[i];
      return g(y) * st;
    };
    double error = 0.0, l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        along, 0.0, std::numbers::pi, 15, kQuadratureTolerance, &error, &l1);
    if (!(error <= 1e-10 * std::max(1.0, l1))) {
      throw Error(ErrorCode::QuadratureFailure, "Gauss-Kronrod rule in theta did not settle");
    }
    return value;
  });
}

std::array<VecN, 3> frame_around(const VecN& s) {
  if (s.size() != 3) return {};
  VecN e3{0.0, 0.0, 1.0};
  const double r = norm(s);
  if (r > 0.0) e3 = {s[0] / r, s[1] / r, s[2] / r};
  // Any unit vector not parallel to e3, orthogonalised.
  VecN seed = std::abs(e3[0]) < 0.9 ? VecN{1.0, 0.0, 0.0} : VecN{0.0, 1.0, 0.0};
  const double proj = dot(seed, e3);
  VecN e1{seed[0] - proj * e3[0], seed[1] - proj * e3[1], seed[2] - proj * e3[2]};
  const double n1 = norm(e1);
  for (double& v : e1) v /= n1;
  VecN e2{e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2],
          e3[0] * e1[1] - e3[1] * e1[0]};
  return {e1, e2, e3};
}

}  // namespace

double unit_ball_volume(int N) {
  check_dimension(N);
  static constexpr std::array<double, 7> table = {
      0.0, 0.0, kPi, 4.0 * kPi / 3.0, kPi * kPi / 2.0, 8.0 * kPi * kPi / 15.0,
      kPi * kPi * kPi / 6.0};
  return table[static_cast<std::size_t>(N)];
}

KernelContext::KernelContext(int dimension) : N(dimension), omega(unit_ball_volume(dimension)) {}

double g0(const VecN& w, const VecN& z, int N) {
  check_points(w, z, N);
  if (dot(w, w) < 1.0 - kSlack || dot(z, z) < 1.0 - kSlack) {
    throw Error(ErrorCode::DomainViolation, "g0 needs |w| >= 1 and |z| >= 1");
  }
  return image_kernel(w, z, N);
}

double g0_normal_derivative(const VecN& w, const VecN& z, int N) {
  check_points(w, z, N);
  if (dot(w, w) <= 1.0 - kSlack) throw Error(ErrorCode::DomainViolation, "normal derivative needs |w| > 1");
  if (std::abs(norm(z) - 1.0) > 1e-12) {
    throw Error(ErrorCode::DomainViolation, "normal derivative needs |z| = 1");
  }
  return (1.0 - dot(w, w)) / (N * unit_ball_volume(N) * std::pow(distance2(w, z), 0.5 * N));
}

double ball_green(const VecN& s, const VecN& y, int N) {
  check_points(s, y, N);
  if (dot(s, s) > 1.0 + kSlack || dot(y, y) > 1.0 + kSlack) {
    throw Error(ErrorCode::DomainViolation, "ball Green function needs |s|, |y| <= 1");
  }
  return image_kernel(s, y, N);
}

double poisson_kernel(const VecN& s, const VecN& y, int N) {
  check_points(s, y, N);
  if (dot(s, s) >= 1.0) throw Error(ErrorCode::DomainViolation, "Poisson kernel needs |s| < 1");
  return (1.0 - dot(s, s)) / (N * unit_ball_volume(N) * std::pow(distance2(s, y), 0.5 * N));
}

double QuadraticPolynomial::operator()(const VecN& x) const {
  const std::size_t n = b.size();
  double v = c + dot(b, x);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) v += x[i] * a[i * n + j] * x[j];
  }
  return v;
}

double QuadraticPolynomial::laplacian() const {
  const std::size_t n = b.size();
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) tr += a[i * n + i];
  return 2.0 * tr;
}

double poisson_identity_check(const QuadraticPolynomial& phi, const VecN& s, int N) {
  if (N != 2 && N != 3) {
    throw Error(ErrorCode::InvalidArgument, "Poisson identity check supports N = 2 and N = 3");
  }
  if (phi.dimension() != N || phi.a.size() != static_cast<std::size_t>(N * N) ||
      static_cast<int>(s.size()) != N) {
    throw Error(ErrorCode::InvalidArgument, "polynomial and point must have dimension N");
  }
  if (dot(s, s) >= 1.0) throw Error(ErrorCode::DomainViolation, "s must lie in the open unit ball");

  const auto frame = frame_around(s);
  const double surface =
      sphere_integral(N, frame, [&](const VecN& y) { return poisson_kernel(s, y, N) * phi(y); });

  // Volume term in polar coordinates about s: y = s + rho * omega, with
  // rho up to the exit distance from the ball. tanh-sinh absorbs the
  // kernel singularity at rho = 0.
  boost::math::quadrature::tanh_sinh<double> radial;
  const double ss = dot(s, s);
  const double volume = sphere_integral(N, frame, [&](const VecN& omega) {
    const double so = dot(s, omega);
    const double exit = -so + std::sqrt(so * so + 1.0 - ss);
    auto integrand = [&](double rho) {
      if (rho <= 0.0) return 0.0;
      VecN y(s);
      for (int i = 0; i < N; ++i) y[i] += rho * omega[i];
      // |y - s| = rho exactly; the singular factor is folded into the
      // rho^{N-1} weight by hand so tiny abscissas stay finite.
      const double img2 = std::max(dot(y, y) * ss - 2.0 * dot(s, y) + 1.0, rho * rho);
      double weighted;
      if (N == 2) {
        weighted = -rho * (2.0 * std::log(rho) - std::log(img2)) / (4.0 * kPi);
      } else {
        weighted = (rho - rho * rho / std::sqrt(img2)) /
                   (3.0 * unit_ball_volume(3));
      }
      return phi.laplacian() * weighted;
    };
    double error = 0.0, l1 = 0.0;
    const double value = radial.integrate(integrand, 0.0, exit, kQuadratureTolerance, &error, &l1);
    if (!(error <= 1e-10 * std::max(1.0, l1))) {
      throw Error(ErrorCode::QuadratureFailure, "tanh-sinh radial rule did not settle");
    }
    return value;
  });

  return std::abs(phi(s) - (surface - volume));
}

double fundamental_solution(Vec2 x, Vec2 y) {
  const double d = norm(x - y);
  if (d == 0.0) throw Error(ErrorCode::InvalidArgument, "fundamental solution at x == y");
  return -std::log(d) / (2.0 * kPi);
}

double disc_regular_part(Vec2 x, Vec2 y) {
  if (dot(x, x) > 1.0 + kSlack || dot(y, y) > 1.0 + kSlack) {
    throw Error(ErrorCode::DomainViolation, "disc Green function needs points in the unit disc");
  }
  const double img2 = dot(x, x) * dot(y, y) - 2.0 * dot(x, y) + 1.0;
  if (img2 <= 0.0) throw Error(ErrorCode::DomainViolation, "both points on the unit circle");
  return std::log(img2) / (4.0 * kPi);
}

double disc_green(Vec2 x, Vec2 y) { return fundamental_solution(x, y) + disc_regular_part(x, y); }

PsiReport psi_eps_verify(Vec2 P, double eps, double h) {
  const GridPtr grid = make_grid(PuncturedDomain(LevelSetDomain::disc(1.0), P, eps), h);
  const Field psi =
      solve_poisson(grid, std::vector<double>(grid->unknown_count(), 0.0), {1.0, 0.0});
  PsiReport report;
  report.eps = eps;
  report.h = h;
  report.probe_radius = 0.2;
  report.probes = 64;
  const double scale = 2.0 * kPi / std::log(eps);
  for (std::size_t k = 0; k < report.probes; ++k) {
    const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(report.probes);
    const Vec2 x = P + report.probe_radius * Vec2{std::cos(t), std::sin(t)};
    const double predicted = 1.0 + scale * disc_green(x, P);
    report.max_deviation = std::max(report.max_deviation, std::abs(psi.sample_value(x) - predicted));
  }
  return report;
}

}  // namespace holepoint
