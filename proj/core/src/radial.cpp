#include "holepoint/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/tools/toms748_solve.hpp>

#include "holepoint/asymptotics.hpp"
#include "holepoint/error.hpp"

namespace holepoint {

namespace {

constexpr double kTolerance = 1e-11;
constexpr int kMaxSteps = 60;
constexpr double kDampingFloor = 1.0 / 32768.0;
constexpr double kUpdateTolerance = 1e-8;

// Linear part of the discrete operator on the unknowns; neighbours outside
// the unknown range are Dirichlet zeros.
struct Tridiagonal {
  VecN lo, di, up;
};

void thomas(const VecN& lo, const VecN& di, const VecN& up, VecN& rhs) {
  const std::size_t m = di.size();
  VecN c(m);
  double denom = di[0];
  c[0] = up[0] / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < m; ++i) {
    denom = di[i] - lo[i] * c[i - 1];
    c[i] = up[i] / denom;
    rhs[i] = (rhs[i] - lo[i] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = m - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

double residual(const Tridiagonal& op, const Nonlinearity& nl, const VecN& u, VecN& out) {
  const std::size_t m = u.size();
  double sup = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double v = op.di[i] * u[i] - nl.f(u[i]);
    if (i > 0) v += op.lo[i] * u[i - 1];
    if (i + 1 < m) v += op.up[i] * u[i + 1];
    out[i] = v;
    sup = std::max(sup, std::abs(v) / op.di[i]);
  }
  return sup;
}

// Damped Newton from zero; returns the step count and final residual. The
// scaled residual of a zero guess is already of order dr^2, so convergence
// also needs at least one step and a last update below 1e-8 of |u|.
std::pair<int, double> newton(const Tridiagonal& op, const Nonlinearity& nl, VecN& u) {
  const std::size_t m = u.size();
  VecN res(m), trial(m), trial_res(m), delta(m), jd(m);
  double r = residual(op, nl, u, res);
  double update = INFINITY;
  int floor_streak = 0;
  for (int step = 0; step <= kMaxSteps; ++step) {
    double unorm = 0.0;
    for (double v : u) unorm = std::max(unorm, std::abs(v));
    if (r <= kTolerance && update <= kUpdateTolerance * unorm) return {step, r};
    if (step == kMaxSteps) break;
    for (std::size_t i = 0; i < m; ++i) {
      jd[i] = op.di[i] - nl.df(u[i]);
      delta[i] = -res[i];
    }
    thomas(op.lo, jd, op.up, delta);
    double lambda = 1.0, tr = 0.0;
    bool hit_floor = false;
    for (;;) {
      for (std::size_t i = 0; i < m; ++i) trial[i] = u[i] + lambda * delta[i];
      tr = residual(op, nl, trial, trial_res);
      if (std::isfinite(tr) && tr <= r) break;
      if (lambda <= kDampingFloor) {
        hit_floor = true;
        break;
      }
      lambda *= 0.5;
    }
    floor_streak = hit_floor ? floor_streak + 1 : 0;
    if (floor_streak >= 2) {
      throw Error(ErrorCode::NewtonStalled, "radial Newton hit the damping floor twice");
    }
    update = 0.0;
    for (double v : delta) update = std::max(update, lambda * std::abs(v));
    u.swap(trial);
    res.swap(trial_res);
    r = tr;
  }
  throw Error(ErrorCode::NoConvergence, "radial Newton did not converge");
}

// Fourth-order differences, one-sided at both ends.
VecN derivative(const VecN& u, double dr) {
  const std::size_t n = u.size() - 1;
  VecN du(n + 1);
  const double s = 1.0 / (12.0 * dr);
  du[0] = s * (-25 * u[0] + 48 * u[1] - 36 * u[2] + 16 * u[3] - 3 * u[4]);
  du[1] = s * (-3 * u[0] - 10 * u[1] + 18 * u[2] - 6 * u[3] + u[4]);
  for (std::size_t k = 2; k + 2 <= n; ++k) {
    du[k] = s * (u[k - 2] - 8 * u[k - 1] + 8 * u[k + 1] - u[k + 2]);
  }
  du[n - 1] = s * (3 * u[n] + 10 * u[n - 1] - 18 * u[n - 2] + 6 * u[n - 3] - u[n - 4]);
  du[n] = s * (25 * u[n] - 48 * u[n - 1] + 36 * u[n - 2] - 16 * u[n - 3] + 3 * u[n - 4]);
  return du;
}

// Cubic Lagrange interpolant of du through four nodes around [r_k, r_k+1].
double cubic_root(const VecN& r, const VecN& du, std::size_t k) {
  const std::size_t n = r.size() - 1;
  const std::size_t first = std::clamp<std::size_t>(k == 0 ? 0 : k - 1, 0, n - 3);
  auto interp = [&](double x) {
    double sum = 0.0;
    for (std::size_t a = first; a < first + 4; ++a) {
      double w = du[a];
      for (std::size_t b = first; b < first + 4; ++b) {
        if (b != a) w *= (x - r[b]) / (r[a] - r[b]);
      }
      sum += w;
    }
    return sum;
  };
  const double flo = interp(r[k]), fhi = interp(r[k + 1]);
  if (fhi == 0.0) return r[k + 1];
  if (flo == 0.0) return r[k];
  std::uintmax_t iterations = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      interp, r[k], r[k + 1], flo, fhi, boost::math::tools::eps_tolerance<double>(52), iterations);
  return 0.5 * (a + b);
}

}  // namespace

std::size_t default_radial_mesh(double eps) {
  const double want = std::ceil(20.0 / eps);
  return static_cast<std::size_t>(std::max(20000.0, std::min(2e6, want)));
}

RadialSolution solve_radial(const RadialProblem& rp) {
  if (rp.N < 2) throw Error(ErrorCode::InvalidArgument, "N must be at least 2");
  if (!(rp.eps > 0.0 && rp.eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must be in (0,1)");
  const std::size_t n = rp.n == 0 ? default_radial_mesh(rp.eps) : rp.n;
  if (n < 256) throw Error(ErrorCode::InvalidArgument, "radial mesh needs at least 256 intervals");
  const double dr = (1.0 - rp.eps) / static_cast<double>(n);
  if ((rp.N - 1) * dr / (2.0 * rp.eps) >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "radial mesh does not resolve the inner radius");
  }

  RadialSolution sol;
  sol.r.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) sol.r[k] = rp.eps + dr * static_cast<double>(k);
  sol.r[n] = 1.0;

  Tridiagonal op;
  const std::size_t m = n - 1;
  op.lo.resize(m);
  op.di.assign(m, 2.0 / (dr * dr));
  op.up.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double drift = (rp.N - 1) / (2.0 * sol.r[i + 1] * dr);
    op.lo[i] = -1.0 / (dr * dr) + drift;
    op.up[i] = -1.0 / (dr * dr) - drift;
  }
  VecN inner(m, 0.0);
  const auto [steps, res] = newton(op, rp.nl, inner);
  sol.newton_iterations = steps;
  sol.residual = res;

  sol.u.assign(n + 1, 0.0);
  std::copy(inner.begin(), inner.end(), sol.u.begin() + 1);
  sol.du = derivative(sol.u, dr);

  std::size_t best = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (sol.du[k] > 0.0 && sol.du[k + 1] <= 0.0) {
      ++sol.sign_changes;
      if (best == n || sol.u[k] > sol.u[best]) best = k;
    }
  }
  if (best == n) {
    throw Error(ErrorCode::NoSignChange, "u' has no descending sign change on (eps, 1)");
  }
  sol.r_eps = cubic_root(sol.r, sol.du, best);
  return sol;
}

double solve_radial_ball_centre(int N, const Nonlinearity& nl, std::size_t n) {
  if (N < 2) throw Error(ErrorCode::InvalidArgument, "N must be at least 2");
  if (n < 256) throw Error(ErrorCode::InvalidArgument, "radial mesh needs at least 256 intervals");
  const double dr = 1.0 / static_cast<double>(n);
  Tridiagonal op;
  op.lo.resize(n);
  op.di.assign(n, 2.0 / (dr * dr));
  op.up.resize(n);
  // At r = 0 the Laplacian is N u''(0), with u''(0) from the even extension.
  op.di[0] = 2.0 * N / (dr * dr);
  op.up[0] = -2.0 * N / (dr * dr);
  for (std::size_t i = 1; i < n; ++i) {
    const double drift = (N - 1) / (2.0 * static_cast<double>(i) * dr * dr);
    op.lo[i] = -1.0 / (dr * dr) + drift;
    op.up[i] = -1.0 / (dr * dr) - drift;
  }
  VecN u(n, 0.0);
  newton(op, nl, u);
  return u[0];
}

std::vector<RadialSweepEntry> radial_sweep(int N, const std::vector<double>& eps_list,
                                           const Nonlinearity& nl, std::size_t n) {
  for (std::size_t k = 1; k < eps_list.size(); ++k) {
    if (!(eps_list[k] < eps_list[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "eps_list must be strictly decreasing");
    }
  }
  const double u00 = solve_radial_ball_centre(N, nl);
  const double f00 = nl.f(u00);
  std::vector<RadialSweepEntry> out;
  for (double eps : eps_list) {
    RadialSweepEntry e;
    e.eps = eps;
    try {
      const RadialSolution sol = solve_radial({N, eps, nl, n});
      const Prediction p = predict_radial(N, eps, u00, f00);
      e.r_eps = sol.r_eps;
      e.newton_iterations = sol.newton_iterations;
      e.ratio_to_law = sol.r_eps / law_scale(p.law, eps, p.exponent);
      e.pred_printed = p.radii.front();
      e.pred_cross = p.radii.back();
    } catch (const Error& err) {
      e.error = err.what();
      e.r_eps = e.ratio_to_law = e.pred_printed = e.pred_cross = NAN;
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace holepoint
