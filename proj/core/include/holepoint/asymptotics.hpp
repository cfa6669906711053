#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "holepoint/field.hpp"
#include "holepoint/vec.hpp"

namespace holepoint {

/// Eigenpairs of a symmetric matrix, eigenvalues ascending, unit vectors.
struct SymmetricEigen {
  VecN values;
  std::vector<VecN> vectors;
};

/// Cyclic Jacobi rotations on a row-major N x N symmetric matrix.
SymmetricEigen symmetric_eigen(const VecN& a, int N);

/// Values of u0 at the hole centre that every predictor reads.
struct LocalData {
  int N = 2;
  VecN P;
  double u0P = 0.0;
  VecN grad0P;
  /// Row-major N x N.
  VecN hess0P;
  /// f(u0(P)); only the radial predictor uses it.
  double fu0P = 0.0;
  /// Regular part H(P, P) of the Green function of the outer domain.
  double HPP = 0.0;

  /// Throws InvalidArgument unless sizes match N, u0P > 0 and the Hessian
  /// is symmetric to 1e-12.
  void validate() const;
  /// |grad u0(P)| small against the local scale of u0.
  bool is_critical(double tol = 1e-6) const;

  nlohmann::json to_json() const;
  static LocalData from_json(const nlohmann::json& j);
};

/// Biquadratic jet of a 2D field at P, symmetrised.
LocalData local_data(const Field& u0, Vec2 P);

enum class PredictionKind { NondegSaddle, DegenFamily, Radial, Count };
/// Scaling of offsets in eps: LOG 1/|log eps|, SQRT_LOG 1/sqrt|log eps|,
/// POWER eps^exponent.
enum class Law { Log, SqrtLog, Power };

std::string to_string(PredictionKind kind);
std::string to_string(Law law);

struct Prediction {
  PredictionKind kind = PredictionKind::Count;
  Law law = Law::Log;
  double exponent = 0.0;
  double eps = 0.0;
  /// Offset coefficient. NONDEG_SADDLE: C_N grad u0(P). DEGEN_FAMILY: one
  /// radius coefficient per negative eigenvalue. RADIAL: the radius
  /// coefficient, or PRINTED then CROSS for N = 2.
  VecN c;
  std::vector<VecN> points;
  /// Critical radii for RADIAL predictions, in the order of c.
  VecN radii;
  int count_delta = 0;
  bool count_is_lower_bound = false;
  /// -1 for the nondegenerate saddle, 0 when not asserted.
  int expected_index = 0;
  double expected_value = 0.0;
  std::vector<std::string> flags;

  nlohmann::json to_json() const;
};

/// C_N of the nondegenerate location law. Throws ZeroGradient.
double c_constant(int N, double u0P, const VecN& grad0P);

/// Saddle created next to a hole at a non-critical point of u0.
Prediction predict_nondegenerate(const LocalData& ld, double eps);

/// Critical points created next to a hole at a nondegenerate critical point
/// of u0: two per negative Hessian eigenvalue, or a count drop of one at a
/// minimum. Throws DegenerateHessian.
Prediction predict_degenerate(const LocalData& ld, double eps);

/// Critical radius of radial solutions on B(0,1) minus B(0,eps). Throws
/// NonpositiveF.
Prediction predict_radial(int N, double eps, double u0_at_0, double f_at_u0_0);

struct LocationVerdict {
  bool match = false;
  /// "NONDEG", "DEGEN+k" or "DEGEN-k" (k the eigenvalue slot), "NONE".
  std::string branch = "NONE";
  /// |x - x_pred| / |x_pred - P| for the closest branch.
  double residual = 0.0;
};

/// Is x within rel_tol of some location allowed for critical points near P?
LocationVerdict necessary_location_check(const VecN& x, const LocalData& ld, double eps,
                                         double rel_tol = 0.2);

/// Leading-order approximation of u_eps near the hole built from u0.
/// Throws TooCloseToHole if |x - P| <= eps.
double expansion_field(Vec2 x, const Field& u0, Vec2 P, double eps, int N, double HPP);

/// Spectrum of I - N xi xi^T / |xi|^2, ascending. Throws ZeroVector.
VecN b_matrix_spectrum(const VecN& xi, int N);

struct RateRecord {
  double eps = 0.0;
  VecN offset;
};

struct RateFit {
  VecN c;
  /// ||offset - c g(eps)|| / ||offset|| over all records.
  double residual = 0.0;
};

/// Least squares for offset = c g(eps) with g from the law. Needs at least
/// three records with strictly decreasing eps (InsufficientData otherwise).
RateFit fit_rate(const std::vector<RateRecord>& records, Law law, double exponent = 0.0);

/// g(eps) for the given law.
double law_scale(Law law, double eps, double exponent = 0.0);

}  // namespace holepoint
