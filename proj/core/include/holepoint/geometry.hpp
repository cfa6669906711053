#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "holepoint/vec.hpp"

namespace holepoint {

enum class DomainKind { Disc, Ellipse, AnnulusOuter };

std::string to_string(DomainKind kind);

struct BoundingBox {
  Vec2 lo;
  Vec2 hi;
};

/// Smooth outer domain described by a signed indicator: negative inside,
/// zero on the boundary, positive outside. All shapes are centred at the
/// origin.
///
/// For the disc the indicator is the exact signed distance. For the ellipse
/// it is (s - 1) * min(a, b) with s the normalised radius, which never
/// overestimates the distance to the boundary from inside.
class LevelSetDomain {
 public:
  static LevelSetDomain disc(double radius);
  static LevelSetDomain ellipse(double a, double b);
  /// Outer circle of an annulus; geometrically identical to disc(radius).
  static LevelSetDomain annulus_outer(double radius);

  DomainKind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }

  double phi(Vec2 x) const;
  Vec2 boundary_point(double theta) const;
  /// Unit outward normal at a boundary point.
  Vec2 outward_normal(Vec2 on_boundary) const;
  BoundingBox bbox() const;
  int euler_characteristic() const { return 1; }

  std::string describe() const;

 private:
  LevelSetDomain(DomainKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  DomainKind kind_;
  double a_;
  double b_;
};

/// Outer domain with the closed ball B(center, eps) removed.
class PuncturedDomain {
 public:
  /// Throws InvalidArgument when eps <= 0 or the circle |x - center| = 3 eps
  /// leaves the outer domain.
  PuncturedDomain(LevelSetDomain outer, Vec2 center, double eps);

  const LevelSetDomain& outer() const { return outer_; }
  Vec2 center() const { return center_; }
  double eps() const { return eps_; }

 private:
  LevelSetDomain outer_;
  Vec2 center_;
  double eps_;
};

struct Hole {
  Vec2 center;
  double eps = 0.0;
};

/// Either a plain level-set domain or a punctured one; the common input of
/// the grid and solver layers.
class Region {
 public:
  Region(const LevelSetDomain& outer) : outer_(outer) {}  // NOLINT: implicit by intent
  Region(const PuncturedDomain& punctured)                 // NOLINT
      : outer_(punctured.outer()), hole_(Hole{punctured.center(), punctured.eps()}) {}

  const LevelSetDomain& outer() const { return outer_; }
  const std::optional<Hole>& hole() const { return hole_; }
  bool punctured() const { return hole_.has_value(); }

  double phi_outer(Vec2 x) const { return outer_.phi(x); }
  double phi_hole(Vec2 x) const;
  /// Combined indicator max(phi_outer, eps - |x - P|).
  double phi(Vec2 x) const;
  /// Lower bound on the distance from x to the nearest boundary (negative
  /// outside).
  double inner_distance(Vec2 x) const { return -phi(x); }
  int euler_characteristic() const { return outer_.euler_characteristic() - (hole_ ? 1 : 0); }

  std::string describe() const;

 private:
  LevelSetDomain outer_;
  std::optional<Hole> hole_;
};

enum class NodeClass : std::uint8_t { Interior, BoundaryCut, Exterior };

enum class BoundaryId : std::uint8_t { None, Outer, Hole };

enum Arm : int { East = 0, West = 1, North = 2, South = 3 };

/// Stencil arms of a BOUNDARY_CUT node. theta[a] is the fraction of h at
/// which arm a meets the boundary, or 1 with boundary[a] == None for an arm
/// that reaches the neighbouring unknown.
struct ArmCut {
  std::array<double, 4> theta{1.0, 1.0, 1.0, 1.0};
  std::array<BoundaryId, 4> boundary{BoundaryId::None, BoundaryId::None, BoundaryId::None,
                                     BoundaryId::None};
};

/// Uniform node grid over the region's bounding box, aligned so that the
/// origin is a node.
class Grid2D {
 public:
  double h() const { return h_; }
  Vec2 origin() const { return origin_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const Region& region() const { return region_; }

  std::size_t node_count() const { return cls_.size(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  Vec2 position(int i, int j) const { return {origin_.x + i * h_, origin_.y + j * h_}; }
  bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }

  NodeClass node_class(int i, int j) const { return cls_[index(i, j)]; }
  /// Unknown index of a non-EXTERIOR node, -1 otherwise (or out of range).
  int unknown(int i, int j) const { return in_range(i, j) ? unknown_[index(i, j)] : -1; }
  std::size_t unknown_count() const { return unknown_nodes_.size(); }
  /// (i, j) of every unknown in unknown order.
  const std::vector<std::array<int, 2>>& unknown_nodes() const { return unknown_nodes_; }
  /// Arm data of the node holding unknown u; all-ones for INTERIOR nodes.
  const ArmCut& arms(int u) const;

  std::size_t interior_count() const { return interior_count_; }
  std::size_t cut_count() const { return unknown_nodes_.size() - interior_count_; }

  /// Stable 64-bit digest of the region parameters and spacing.
  std::uint64_t domain_hash() const;

 private:
  friend Grid2D classify(const Region& region, double h);
  explicit Grid2D(Region region) : region_(std::move(region)) {}

  Region region_;
  double h_ = 0.0;
  Vec2 origin_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<NodeClass> cls_;
  std::vector<int> unknown_;
  std::vector<std::array<int, 2>> unknown_nodes_;
  std::vector<int> cut_slot_;  // per unknown, -1 for INTERIOR
  std::vector<ArmCut> cuts_;
  std::size_t interior_count_ = 0;
};

using GridPtr = std::shared_ptr<const Grid2D>;

/// Classifies the nodes of a grid with spacing h. Punctured regions require
/// h <= eps / 4 (HoleUnresolved otherwise); EmptyInterior when no node has
/// all four neighbours inside.
Grid2D classify(const Region& region, double h);
GridPtr make_grid(const Region& region, double h);

/// Discrete -Laplacian on the unknowns, five-point in the bulk and
/// Shortley-Weller next to the boundary. Dirichlet data enter through
/// outer_coupling / hole_coupling: the right-hand side of row i gains
/// outer_coupling[i] * g_outer + hole_coupling[i] * g_hole.
struct SparseOperator {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<int> col;
  std::vector<double> val;
  std::vector<double> diag;
  std::vector<double> outer_coupling;
  std::vector<double> hole_coupling;

  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  double row_sum(std::size_t r) const;
};

SparseOperator build_laplacian(const Grid2D& grid);

struct MMatrixReport {
  bool positive_diagonal = true;
  bool nonpositive_offdiagonal = true;
  bool weakly_dominant = true;
  bool strict_at_boundary_rows = true;
  bool ok() const {
    return positive_diagonal && nonpositive_offdiagonal && weakly_dominant &&
           strict_at_boundary_rows;
  }
};

/// Row-by-row check of the M-matrix sign and dominance pattern.
MMatrixReport check_m_matrix(const SparseOperator& op, const Grid2D& grid);

}  // namespace holepoint
