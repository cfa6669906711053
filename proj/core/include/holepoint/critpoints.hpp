#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "holepoint/field.hpp"
#include "holepoint/vec.hpp"

namespace holepoint {

enum class CritClass { Max, Min, Saddle, Degenerate };

std::string to_string(CritClass cls);

/// MAX/MIN when both eigenvalues exceed tau in modulus with a common sign,
/// SADDLE when det < -tau^2, DEGENERATE otherwise. tau is 1e-4 times the
/// largest eigenvalue modulus.
CritClass classify_hessian(const SymMat2& hessian);

struct CriticalPoint {
  Vec2 x;
  double value = 0.0;
  /// |grad u| when refinement stopped.
  double grad_norm = 0.0;
  SymMat2 hessian;
  /// Winding number when it could be computed, otherwise the Hessian sign
  /// (0 for DEGENERATE).
  int index = 0;
  CritClass cls = CritClass::Degenerate;
  bool index_from_winding = false;
  /// Error code of a failed winding computation, empty otherwise.
  std::string index_error;

  nlohmann::json to_json() const;
};

/// Circle of degenerate critical points around a hole centre.
struct Ring {
  Vec2 center;
  /// Median distance of the ring candidates from the centre.
  double radius = 0.0;
  /// Largest deviation of a member from the median radius.
  double spread = 0.0;
  int candidates = 0;
  /// Occupied sectors out of 32.
  int sectors = 0;
};

struct CritDiagnostics {
  std::size_t flagged_cells = 0;
  std::size_t converged = 0;
  std::size_t nonconvergent = 0;
  std::size_t outside_margin = 0;
  std::size_t merged = 0;
};

struct CritSet {
  std::vector<CriticalPoint> points;
  double margin = 0.0;
  double dedup_radius = 0.0;
  std::vector<Ring> rings;
  CritDiagnostics diagnostics;

  /// Array of points as {"x","y","value","index","class","grad_norm","hess"}.
  nlohmann::json to_json() const;
  /// Points plus rings, margin and diagnostics.
  nlohmann::json report_json() const;

  int count(CritClass cls) const;
};

/// Sign-change pass over grid cells, Newton refinement of each flagged cell
/// on the local biquadratic, deduplication within 2h, classification and
/// indexing. Points closer than margin to either boundary are dropped.
/// margin = 0 selects 3h; smaller positive values throw InvalidArgument.
CritSet find_critical_points(const Field& field, double margin = 0.0);

/// 4h, or max(4h, eps/2) next to the hole, reduced if needed so the circle
/// keeps 2h from both boundaries.
double default_index_radius(const Field& field, Vec2 x);

/// Winding number of grad u along a circle of radius rho around x: 256
/// samples, retried with 1024 when an angle increment exceeds pi/2.
/// Throws TooCloseToBoundary, GradientTooSmallOnCircle (min |grad u| below
/// 1e-3 of the max on the circle) or UnderSampled.
int index_of(const Field& field, Vec2 x, double rho);

enum class AuditStatus { Pass, Fail, Inapplicable };

std::string to_string(AuditStatus status);

struct AuditRecord {
  int index_sum = 0;
  /// Euler characteristic of the region.
  int target = 0;
  AuditStatus status = AuditStatus::Inapplicable;
  /// Why the audit does not apply; empty otherwise.
  std::string reason;
  /// Largest grad u . nu over the boundary probes.
  double worst_flux = 0.0;

  nlohmann::json to_json() const;
};

/// Index sum against the Euler characteristic. The gradient has to point
/// strictly inward at 128 probes per boundary curve, placed 4h inside;
/// otherwise, or when the set contains rings or unindexed points, the
/// record is INAPPLICABLE with a reason naming BoundaryConditionViolated or
/// the missing index.
AuditRecord poincare_hopf_audit(const CritSet& cs, const Field& field);

struct Pairing {
  struct Pair {
    std::size_t reference = 0;
    std::size_t perturbed = 0;
    double distance = 0.0;
  };
  std::vector<Pair> pairs;
  /// Reference points with no partner within d.
  std::vector<std::size_t> lost;
  /// Perturbed points paired with nothing.
  std::vector<std::size_t> extras;
};

/// Pairs every point of cs_0 with the unique point of cs_eps within d.
/// Throws DegenerateHessian if cs_0 holds a DEGENERATE point and
/// PairingAmbiguous if two candidates fall within d of one reference point.
Pairing persistence_match(const CritSet& cs_eps, const CritSet& cs_0, double d);

}  // namespace holepoint
