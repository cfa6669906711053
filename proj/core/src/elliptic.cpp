#include "holepoint/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "holepoint/error.hpp"

namespace holepoint {

Nonlinearity Nonlinearity::torsion() {
  return Nonlinearity(
      NonlinearityKind::Torsion, [](double) { return 1.0; }, [](double) { return 0.0; },
      "torsion", true);
}

Nonlinearity Nonlinearity::linear_eigen() {
  // f and f' are not used directly: the eigenvalue is an output of the solve.
  return Nonlinearity(
      NonlinearityKind::LinearEigen, [](double s) { return s; }, [](double) { return 1.0; },
      "linear-eigen", true);
}

Nonlinearity Nonlinearity::custom(Fn f, Fn df, std::string label, bool smooth) {
  if (!f || !df) throw Error(ErrorCode::InvalidArgument, "custom nonlinearity needs f and f'");
  return Nonlinearity(NonlinearityKind::Custom, std::move(f), std::move(df), std::move(label),
                      smooth);
}

namespace {

std::vector<double> lifted_rhs(const SparseOperator& op, const std::vector<double>& rhs,
                               BoundaryData boundary) {
  std::vector<double> b = rhs;
  if (boundary.outer != 0.0 || boundary.hole != 0.0) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] += op.outer_coupling[i] * boundary.outer + op.hole_coupling[i] * boundary.hole;
    }
  }
  return b;
}

// F(u) = A u - f(u), scaled row-wise by the stencil diagonal.
double scaled_residual(const SparseOperator& op, const Nonlinearity& nl,
                       const std::vector<double>& u, std::vector<double>& residual) {
  op.apply(u, residual);
  double sup = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    residual[i] -= nl.f(u[i]);
    sup = std::max(sup, std::abs(residual[i]) / op.diag[i]);
  }
  return sup;
}

}  // namespace

Field solve_poisson(const GridPtr& grid, const std::vector<double>& rhs, BoundaryData boundary,
                    const LinearSolveOptions& options) {
  if (rhs.size() != grid->unknown_count()) {
    throw Error(ErrorCode::InvalidArgument, "rhs must have one value per unknown");
  }
  for (double v : rhs) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "rhs is not finite");
  }
  const SparseOperator op = build_laplacian(*grid);
  const std::vector<double> b = lifted_rhs(op, rhs, boundary);
  std::vector<double> x(b.size(), 0.0);
  const LinearSolveReport rep = solve_linear(op, {}, b, x, options);
  Field field(grid, std::move(x), boundary);
  field.meta.nonlinearity = "poisson";
  field.meta.residual = rep.relative_residual;
  field.meta.linear_iterations = rep.iterations;
  field.meta.used_bicgstab = rep.switched_to_bicgstab;
  return field;
}

Field solve_semilinear(const GridPtr& grid, const Nonlinearity& nl, const Field& u_init,
                       const NewtonOptions& options) {
  if (nl.kind() == NonlinearityKind::LinearEigen) {
    throw Error(ErrorCode::InvalidArgument, "linear-eigen problems are solved by solve_eigen");
  }
  if (u_init.values().size() != grid->unknown_count()) {
    throw Error(ErrorCode::InvalidArgument, "initial guess does not match the grid");
  }
  const SparseOperator op = build_laplacian(*grid);
  std::vector<double> u = u_init.values();
  for (double v : u) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "initial guess is not finite");
  }
  const std::size_t n = u.size();
  std::vector<double> residual(n), trial(n), trial_residual(n), delta(n), shift(n), rhs(n);
  SolveMeta meta;
  meta.nonlinearity = nl.label();

  double res = scaled_residual(op, nl, u, residual);
  meta.newton_trace.push_back(res);
  int floor_streak = 0;
  // At least one step: on a grid fine enough the scaled residual of a zero
  // guess can already sit below the tolerance.
  int taken = 0;
  auto converged = [&] { return taken > 0 && res <= options.tolerance; };
  auto finish = [&](int steps) {
    meta.residual = res;
    meta.newton_steps = steps;
    Field out(grid, std::move(u));
    out.meta = std::move(meta);
    return out;
  };
  for (int step = 0; step < options.max_steps; ++step) {
    if (converged()) return finish(step);
    // Jacobian A - diag(f'(u)).
    for (std::size_t i = 0; i < n; ++i) {
      shift[i] = -nl.df(u[i]);
      rhs[i] = -residual[i];
    }
    std::fill(delta.begin(), delta.end(), 0.0);
    LinearSolveReport rep;
    try {
      rep = solve_linear(op, shift, rhs, delta, options.linear);
    } catch (const Error& err) {
      // A residual already below tolerance is rounding noise; the relative
      // target of the correction solve may then be out of reach.
      if (err.code() == ErrorCode::NoConvergence && res <= options.tolerance) return finish(step);
      throw;
    }
    meta.linear_iterations += rep.iterations;
    meta.used_bicgstab = meta.used_bicgstab || rep.switched_to_bicgstab;

    double lambda = 1.0;
    double trial_res = 0.0;
    bool hit_floor = false;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + lambda * delta[i];
      trial_res = scaled_residual(op, nl, trial, trial_residual);
      if (std::isfinite(trial_res) && trial_res <= res) break;
      if (lambda <= options.damping_floor) {
        hit_floor = true;
        break;
      }
      lambda *= 0.5;
    }
    floor_streak = hit_floor ? floor_streak + 1 : 0;
    if (floor_streak >= 2) {
      throw Error(ErrorCode::NewtonStalled, "damping floor reached on two consecutive steps");
    }
    ++taken;
    u.swap(trial);
    residual.swap(trial_residual);
    res = trial_res;
    meta.newton_trace.push_back(res);
  }
  if (converged()) return finish(options.max_steps);
  throw Error(ErrorCode::NoConvergence,
              "Newton did not converge in " + std::to_string(options.max_steps) + " steps");
}

EigenPair solve_eigen(const GridPtr& grid, const EigenOptions& options) {
  const SparseOperator op = build_laplacian(*grid);
  const std::size_t n = grid->unknown_count();
  std::vector<double> phi(n, 0.0), next(n), aphi(n);
  const std::vector<double> ones(n, 1.0);
  std::size_t linear_iterations = 0;
  {
    const LinearSolveReport rep = solve_linear(op, {}, ones, phi, options.linear);
    linear_iterations += rep.iterations;
  }

  auto normalise = [](std::vector<double>& v) {
    double peak = 0.0;
    for (double x : v) peak = std::abs(x) > std::abs(peak) ? x : peak;
    for (double& x : v) x /= peak;
  };
  normalise(phi);

  double lambda = 0.0;
  for (int it = 1; it <= options.max_outer; ++it) {
    op.apply(phi, aphi);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += phi[i] * aphi[i];
      den += phi[i] * phi[i];
    }
    lambda = num / den;
    double rr = 0.0;
    for (std::size_t i = 0; i < n; ++i) rr += (aphi[i] - lambda * phi[i]) * (aphi[i] - lambda * phi[i]);
    const double relative = std::sqrt(rr / den) / lambda;
    if (relative <= options.tolerance) {
      Field field(grid, std::move(phi));
      field.meta.nonlinearity = "linear-eigen";
      field.meta.residual = relative;
      field.meta.linear_iterations = linear_iterations;
      return EigenPair{lambda, std::move(field), it};
    }
    // Warm start phi / lambda leaves an initial relative residual equal to
    // the eigen-residual, so each inner solve only has to gain a fixed
    // factor on it.
    for (std::size_t i = 0; i < n; ++i) next[i] = phi[i] / lambda;
    LinearSolveOptions inner = options.linear;
    inner.rtol = std::clamp(1e-2 * relative, options.linear.rtol, 1e-4);
    const LinearSolveReport rep = solve_linear(op, {}, phi, next, inner);
    linear_iterations += rep.iterations;
    phi.swap(next);
    normalise(phi);
  }
  throw Error(ErrorCode::NoConvergence, "inverse iteration did not converge in " +
                                            std::to_string(options.max_outer) + " steps");
}

Field solve_state(const GridPtr& grid, const Nonlinearity& nl) {
  switch (nl.kind()) {
    case NonlinearityKind::Torsion: {
      Field u = solve_poisson(grid, std::vector<double>(grid->unknown_count(), 1.0));
      u.meta.nonlinearity = "torsion";
      return u;
    }
    case NonlinearityKind::LinearEigen: return solve_eigen(grid).phi;
    case NonlinearityKind::Custom: {
      const Field zero(grid, std::vector<double>(grid->unknown_count(), 0.0));
      return solve_semilinear(grid, nl, zero);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown nonlinearity");
}

}  // namespace holepoint
