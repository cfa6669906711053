#include "holepoint/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "holepoint/error.hpp"

namespace holepoint {

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Disc: return "disc";
    case DomainKind::Ellipse: return "ellipse";
    case DomainKind::AnnulusOuter: return "annulus-outer";
  }
  return "unknown";
}

LevelSetDomain LevelSetDomain::disc(double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "disc radius must be positive");
  return LevelSetDomain(DomainKind::Disc, radius, radius);
}

LevelSetDomain LevelSetDomain::ellipse(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "ellipse semi-axes must be positive");
  }
  return LevelSetDomain(DomainKind::Ellipse, a, b);
}

LevelSetDomain LevelSetDomain::annulus_outer(double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "annulus radius must be positive");
  return LevelSetDomain(DomainKind::AnnulusOuter, radius, radius);
}

double LevelSetDomain::phi(Vec2 x) const {
  if (kind_ == DomainKind::Ellipse) {
    const double s = std::hypot(x.x / a_, x.y / b_);
    return (s - 1.0) * std::min(a_, b_);
  }
  return norm(x) - a_;
}

Vec2 LevelSetDomain::boundary_point(double theta) const {
  return {a_ * std::cos(theta), b_ * std::sin(theta)};
}

Vec2 LevelSetDomain::outward_normal(Vec2 p) const {
  const Vec2 g{p.x / (a_ * a_), p.y / (b_ * b_)};
  return g / norm(g);
}

BoundingBox LevelSetDomain::bbox() const { return {{-a_, -b_}, {a_, b_}}; }

std::string LevelSetDomain::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind_) << '(' << a_;
  if (kind_ == DomainKind::Ellipse) os << ',' << b_;
  os << ')';
  return os.str();
}

PuncturedDomain::PuncturedDomain(LevelSetDomain outer, Vec2 center, double eps)
    : outer_(outer), center_(center), eps_(eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "hole radius must be positive");
  constexpr int kProbes = 720;
  for (int k = 0; k < kProbes; ++k) {
    const double t = 2.0 * std::numbers::pi * k / kProbes;
    const Vec2 q = center + 3.0 * eps * Vec2{std::cos(t), std::sin(t)};
    if (!(outer_.phi(q) < 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "hole with its 2*eps safety margin does not fit inside the outer domain");
    }
  }
}

double Region::phi_hole(Vec2 x) const {
  if (!hole_) return -std::numeric_limits<double>::infinity();
  return hole_->eps - norm(x - hole_->center);
}

double Region::phi(Vec2 x) const { return std::max(phi_outer(x), phi_hole(x)); }

std::string Region::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << outer_.describe();
  if (hole_) os << "\\B((" << hole_->center.x << ',' << hole_->center.y << ")," << hole_->eps << ')';
  return os.str();
}

const ArmCut& Grid2D::arms(int u) const {
  static const ArmCut kFull{};
  const int slot = cut_slot_[static_cast<std::size_t>(u)];
  return slot < 0 ? kFull : cuts_[static_cast<std::size_t>(slot)];
}

std::uint64_t Grid2D::domain_hash() const {
  // FNV-1a over the canonical description and the bit pattern of h.
  std::uint64_t hash = 1469598103934665603ULL;
  auto mix = [&hash](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash ^= p[i];
      hash *= 1099511628211ULL;
    }
  };
  const std::string desc = region_.describe();
  mix(desc.data(), desc.size());
  mix(&h_, sizeof h_);
  return hash;
}

namespace {

constexpr std::array<std::array<int, 2>, 4> kArmOffsets{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

bool is_exterior(const Region& region, Vec2 x) {
  if (region.phi_outer(x) >= 0.0) return true;
  const auto& hole = region.hole();
  return hole && norm(x - hole->center) <= hole->eps;
}

// Bisection on the combined indicator along the arm from an inside node
// (t = 0) to an exterior point (t = 1).
std::pair<double, BoundaryId> cut_arm(const Region& region, Vec2 from, Vec2 to, double tol) {
  double lo = 0.0;
  double hi = 1.0;
  auto at = [&](double t) { return from + t * (to - from); };
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (is_exterior(region, at(mid))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double theta = 0.5 * (lo + hi);
  const Vec2 q = at(hi);
  const BoundaryId which =
      region.phi_outer(q) >= region.phi_hole(q) ? BoundaryId::Outer : BoundaryId::Hole;
  return {std::clamp(theta, std::numeric_limits<double>::min(), 1.0), which};
}

}  // namespace

Grid2D classify(const Region& region, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
  }
  if (region.hole() && h > region.hole()->eps / 4.0) {
    throw Error(ErrorCode::HoleUnresolved, "h must not exceed eps/4");
  }

  Grid2D grid(region);
  grid.h_ = h;
  const BoundingBox box = region.outer().bbox();
  const int i_lo = static_cast<int>(std::floor(box.lo.x / h)) - 1;
  const int i_hi = static_cast<int>(std::ceil(box.hi.x / h)) + 1;
  const int j_lo = static_cast<int>(std::floor(box.lo.y / h)) - 1;
  const int j_hi = static_cast<int>(std::ceil(box.hi.y / h)) + 1;
  grid.origin_ = {i_lo * h, j_lo * h};
  grid.nx_ = i_hi - i_lo + 1;
  grid.ny_ = j_hi - j_lo + 1;

  const std::size_t count = static_cast<std::size_t>(grid.nx_) * grid.ny_;
  grid.cls_.assign(count, NodeClass::Exterior);
  grid.unknown_.assign(count, -1);

  for (int j = 0; j < grid.ny_; ++j) {
    for (int i = 0; i < grid.nx_; ++i) {
      if (!is_exterior(region, grid.position(i, j))) {
        grid.cls_[grid.index(i, j)] = NodeClass::Interior;
      }
    }
  }

  const double tol = 1e-12;  // in units of h, i.e. 1e-12 * h absolute
  for (int j = 0; j < grid.ny_; ++j) {
    for (int i = 0; i < grid.nx_; ++i) {
      const std::size_t idx = grid.index(i, j);
      if (grid.cls_[idx] == NodeClass::Exterior) continue;
      const int u = static_cast<int>(grid.unknown_nodes_.size());
      grid.unknown_[idx] = u;
      grid.unknown_nodes_.push_back({i, j});

      ArmCut cut;
      bool any = false;
      for (int a = 0; a < 4; ++a) {
        const int ni = i + kArmOffsets[a][0];
        const int nj = j + kArmOffsets[a][1];
        const bool outside =
            !grid.in_range(ni, nj) || grid.cls_[grid.index(ni, nj)] == NodeClass::Exterior;
        if (!outside) continue;
        any = true;
        const auto [theta, which] =
            cut_arm(region, grid.position(i, j), grid.position(ni, nj), tol);
        cut.theta[a] = theta;
        cut.boundary[a] = which;
      }
      if (any) {
        grid.cut_slot_.push_back(static_cast<int>(grid.cuts_.size()));
        grid.cuts_.push_back(cut);
      } else {
        grid.cut_slot_.push_back(-1);
        ++grid.interior_count_;
      }
    }
  }
  for (std::size_t u = 0; u < grid.unknown_nodes_.size(); ++u) {
    if (grid.cut_slot_[u] >= 0) {
      const auto [i, j] = grid.unknown_nodes_[u];
      grid.cls_[grid.index(i, j)] = NodeClass::BoundaryCut;
    }
  }
  if (grid.interior_count_ == 0) {
    throw Error(ErrorCode::EmptyInterior, "no node has all four neighbours inside the domain");
  }
  return grid;
}

GridPtr make_grid(const Region& region, double h) {
  return std::make_shared<const Grid2D>(classify(region, h));
}

void SparseOperator::apply(const std::vector<double>& x, std::vector<double>& y) const {
  y.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

double SparseOperator::row_sum(std::size_t r) const {
  double s = 0.0;
  for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k];
  return s;
}

SparseOperator build_laplacian(const Grid2D& grid) {
  SparseOperator op;
  const std::size_t n = grid.unknown_count();
  const double h2 = grid.h() * grid.h();
  op.rows = n;
  op.row_ptr.reserve(n + 1);
  op.col.reserve(5 * n);
  op.val.reserve(5 * n);
  op.diag.resize(n);
  op.outer_coupling.assign(n, 0.0);
  op.hole_coupling.assign(n, 0.0);
  op.row_ptr.push_back(0);

  for (std::size_t u = 0; u < n; ++u) {
    const auto [i, j] = grid.unknown_nodes()[u];
    const ArmCut& arms = grid.arms(static_cast<int>(u));
    // Per axis: coefficient of the far node on each arm, and the centre.
    std::array<double, 4> coef{};
    double centre = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      const int plus = 2 * axis;
      const int minus = plus + 1;
      const double tp = arms.theta[plus];
      const double tm = arms.theta[minus];
      coef[plus] = 2.0 / (tp * (tp + tm) * h2);
      coef[minus] = 2.0 / (tm * (tp + tm) * h2);
      centre += 2.0 / (tp * tm * h2);
    }

    // Column order: centre first, then neighbours in arm order; sorted by
    // column index afterwards so the layout does not depend on arm order.
    std::array<std::pair<int, double>, 5> entries{};
    int count = 0;
    entries[count++] = {static_cast<int>(u), centre};
    for (int a = 0; a < 4; ++a) {
      switch (arms.boundary[a]) {
        case BoundaryId::Outer: op.outer_coupling[u] += coef[a]; break;
        case BoundaryId::Hole: op.hole_coupling[u] += coef[a]; break;
        case BoundaryId::None: {
          const int ni = i + kArmOffsets[a][0];
          const int nj = j + kArmOffsets[a][1];
          entries[count++] = {grid.unknown(ni, nj), -coef[a]};
          break;
        }
      }
    }
    std::sort(entries.begin(), entries.begin() + count);
    for (int k = 0; k < count; ++k) {
      op.col.push_back(entries[k].first);
      op.val.push_back(entries[k].second);
    }
    op.diag[u] = centre;
    op.row_ptr.push_back(op.col.size());
  }
  return op;
}

MMatrixReport check_m_matrix(const SparseOperator& op, const Grid2D& grid) {
  MMatrixReport rep;
  for (std::size_t r = 0; r < op.rows; ++r) {
    double off = 0.0;
    for (std::size_t k = op.row_ptr[r]; k < op.row_ptr[r + 1]; ++k) {
      if (static_cast<std::size_t>(op.col[k]) == r) {
        if (!(op.val[k] > 0.0)) rep.positive_diagonal = false;
      } else {
        if (op.val[k] > 0.0) rep.nonpositive_offdiagonal = false;
        off += -op.val[k];
      }
    }
    const double slack = op.diag[r] - off;
    const double scale = 1e-12 * op.diag[r];
    if (slack < -scale) rep.weakly_dominant = false;
    const bool boundary_row = grid.arms(static_cast<int>(r)).theta != ArmCut{}.theta ||
                              grid.arms(static_cast<int>(r)).boundary != ArmCut{}.boundary;
    if (boundary_row && !(slack > scale)) rep.strict_at_boundary_rows = false;
  }
  return rep;
}

}  // namespace holepoint
