#include "holepoint/linear_solver.hpp"

#include <cmath>
#include <string>

#include "holepoint/error.hpp"

namespace holepoint {

namespace {

double inner(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

class System {
 public:
  System(const SparseOperator& op, const std::vector<double>& shift) : op_(op), shift_(shift) {
    inv_diag_.resize(op.rows);
    for (std::size_t i = 0; i < op.rows; ++i) {
      inv_diag_[i] = 1.0 / (op.diag[i] + (shift.empty() ? 0.0 : shift[i]));
    }
  }

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    op_.apply(x, y);
    if (!shift_.empty()) {
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += shift_[i] * x[i];
    }
  }

  double scaled_norm(const std::vector<double>& r) const {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += inv_diag_[i] * inv_diag_[i] * r[i] * r[i];
    return std::sqrt(s);
  }

  void precondition(const std::vector<double>& r, std::vector<double>& z) const {
    z.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
  }

 private:
  const SparseOperator& op_;
  const std::vector<double>& shift_;
  std::vector<double> inv_diag_;
};

enum class CgOutcome { Converged, Fallback };

CgOutcome run_cg(const System& sys, const std::vector<double>& b, std::vector<double>& x,
                 double target, std::size_t cap, int fallback_after, LinearSolveReport& rep) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), ap(n);
  sys.apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  double rnorm = sys.scaled_norm(r);
  if (rnorm <= target) return CgOutcome::Converged;
  sys.precondition(r, z);
  p = z;
  double rz = inner(r, z);
  int rising = 0;

  while (rep.iterations < cap) {
    sys.apply(p, ap);
    const double pap = inner(p, ap);
    if (!(pap > 0.0)) return CgOutcome::Fallback;
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    ++rep.iterations;
    const double next = sys.scaled_norm(r);
    if (next <= target) return CgOutcome::Converged;
    rising = next > rnorm ? rising + 1 : 0;
    rnorm = next;
    if (rising >= fallback_after) return CgOutcome::Fallback;
    sys.precondition(r, z);
    const double rz_next = inner(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw Error(ErrorCode::NoConvergence,
              "CG reached the iteration cap of " + std::to_string(cap));
}

void run_bicgstab(const System& sys, const std::vector<double>& b, std::vector<double>& x,
                  double target, std::size_t cap, LinearSolveReport& rep) {
  const std::size_t n = b.size();
  std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), y(n), s(n), z(n), t(n);
  sys.apply(x, t);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
  if (sys.scaled_norm(r) <= target) return;
  rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;

  while (rep.iterations < cap) {
    const double rho_next = inner(rhat, r);
    if (std::abs(rho_next) < 1e-300) {
      // Shadow residual became orthogonal; restart from the current residual.
      rhat = r;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho = alpha = omega = 1.0;
      continue;
    }
    const double beta = (rho_next / rho) * (alpha / omega);
    rho = rho_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    sys.precondition(p, y);
    sys.apply(y, v);
    alpha = rho / inner(rhat, v);
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    ++rep.iterations;
    if (sys.scaled_norm(s) <= target) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * y[i];
      return;
    }
    sys.precondition(s, z);
    sys.apply(z, t);
    const double tt = inner(t, t);
    omega = tt > 0.0 ? inner(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * y[i] + omega * z[i];
      r[i] = s[i] - omega * t[i];
    }
    if (sys.scaled_norm(r) <= target) return;
    if (omega == 0.0) {
      rhat = r;
      rho = alpha = omega = 1.0;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "BiCGStab reached the iteration cap of " + std::to_string(cap));
}

}  // namespace

LinearSolveReport solve_linear(const SparseOperator& op, const std::vector<double>& shift,
                               const std::vector<double>& b, std::vector<double>& x,
                               const LinearSolveOptions& options) {
  LinearSolveReport rep;
  const std::size_t n = op.rows;
  if (b.size() != n) throw Error(ErrorCode::InvalidArgument, "rhs size mismatch");
  x.resize(n, 0.0);
  const System sys(op, shift);
  // Norms are taken after Jacobi scaling: rows cut very close to the
  // boundary carry diagonals many orders above the rest, and their rounding
  // error would otherwise dominate an unscaled residual.
  const double bnorm = sys.scaled_norm(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return rep;
  }
  const std::size_t cap =
      options.max_iterations > 0
          ? options.max_iterations
          : static_cast<std::size_t>(std::ceil(20.0 * std::sqrt(static_cast<double>(n))));
  const double target = options.rtol * bnorm;

  std::vector<double> ax;
  auto true_residual = [&] {
    sys.apply(x, ax);
    for (std::size_t i = 0; i < n; ++i) ax[i] = b[i] - ax[i];
    return sys.scaled_norm(ax);
  };

  if (run_cg(sys, b, x, target, cap, options.fallback_after, rep) == CgOutcome::Fallback) {
    rep.switched_to_bicgstab = true;
    run_bicgstab(sys, b, x, target, cap, rep);
  }
  // The recursively updated residual can drift from the true one; restart
  // from the current iterate until the true residual meets the target.
  double rnorm = true_residual();
  for (int restart = 0; rnorm > target && restart < 4; ++restart) {
    rep.switched_to_bicgstab = true;
    run_bicgstab(sys, b, x, target, cap, rep);
    rnorm = true_residual();
  }
  rep.relative_residual = rnorm / bnorm;
  if (rnorm > target) {
    throw Error(ErrorCode::NoConvergence, "true residual stalled above the tolerance");
  }
  return rep;
}

}  // namespace holepoint
