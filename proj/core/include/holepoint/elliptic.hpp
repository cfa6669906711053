#pragma once

#include <functional>
#include <string>
#include <vector>

#include "holepoint/field.hpp"
#include "holepoint/geometry.hpp"
#include "holepoint/linear_solver.hpp"

namespace holepoint {

enum class NonlinearityKind { Torsion, LinearEigen, Custom };

/// Right-hand side f(u) of -Laplace(u) = f(u).
class Nonlinearity {
 public:
  using Fn = std::function<double(double)>;

  static Nonlinearity torsion();
  /// f = lambda u with lambda the first eigenvalue; solved by solve_eigen.
  static Nonlinearity linear_eigen();
  static Nonlinearity custom(Fn f, Fn df, std::string label = "custom", bool smooth = true);

  NonlinearityKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  bool smooth() const { return smooth_; }
  double f(double s) const { return f_(s); }
  double df(double s) const { return df_(s); }

 private:
  Nonlinearity(NonlinearityKind kind, Fn f, Fn df, std::string label, bool smooth)
      : kind_(kind), f_(std::move(f)), df_(std::move(df)), label_(std::move(label)),
        smooth_(smooth) {}

  NonlinearityKind kind_;
  Fn f_;
  Fn df_;
  std::string label_;
  bool smooth_;
};

/// Linear solve of -Laplace(u) = rhs with the given Dirichlet data.
Field solve_poisson(const GridPtr& grid, const std::vector<double>& rhs,
                    BoundaryData boundary = {}, const LinearSolveOptions& options = {});

struct NewtonOptions {
  double tolerance = 1e-9;
  int max_steps = 60;
  double damping_floor = 1.0 / 32768.0;
  LinearSolveOptions linear;
};

/// Damped Newton for -Laplace(u) = f(u), u = 0 on both boundaries. The
/// residual is measured in the sup norm of the diagonally scaled rows, and
/// at least one step is always taken.
/// Throws NewtonStalled when two consecutive steps hit the damping floor and
/// NoConvergence after max_steps.
Field solve_semilinear(const GridPtr& grid, const Nonlinearity& nl, const Field& u_init,
                       const NewtonOptions& options = {});

struct EigenOptions {
  double tolerance = 1e-8;
  int max_outer = 200;
  LinearSolveOptions linear{1e-10};
};

struct EigenPair {
  double lambda;
  Field phi;
  int outer_iterations;
};

/// First Dirichlet eigenpair by inverse power iteration; phi is positive
/// with maximum 1.
EigenPair solve_eigen(const GridPtr& grid, const EigenOptions& options = {});

/// Positive solution for the given nonlinearity: torsion by one Poisson
/// solve, linear-eigen by solve_eigen, custom by Newton from zero.
Field solve_state(const GridPtr& grid, const Nonlinearity& nl);

}  // namespace holepoint
