#include "holepoint/critpoints.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <boost/math/tools/minima.hpp>

#include "holepoint/error.hpp"

namespace holepoint {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kNewtonSteps = 40;
// Iterations after which Newton stops following the nearest-node patch; the
// biquadratics of neighbouring patches differ slightly and an iterate on a
// patch border can otherwise bounce between them.
constexpr int kLockPatchAfter = 20;
constexpr int kRingSectors = 32;
constexpr int kRingMinimum = 8;
constexpr int kAuditProbes = 128;

// Central-difference gradient at a node whose four neighbours are unknowns.
std::optional<Vec2> node_gradient(const Field& field, int i, int j) {
  const Grid2D& g = field.grid();
  const int e = g.unknown(i + 1, j), w = g.unknown(i - 1, j);
  const int n = g.unknown(i, j + 1), s = g.unknown(i, j - 1);
  if (e < 0 || w < 0 || n < 0 || s < 0) return std::nullopt;
  const auto& v = field.values();
  const double inv = 0.5 / g.h();
  return Vec2{(v[e] - v[w]) * inv, (v[n] - v[s]) * inv};
}

// H^+ g with eigenvalues below 1e-10 of the largest treated as zero.
std::optional<Vec2> newton_step(const SymMat2& hess, Vec2 grad) {
  const auto [lo, hi] = eigenvalues(hess);
  const double scale = std::max(std::abs(lo), std::abs(hi));
  if (!(scale > 0.0)) return std::nullopt;
  Vec2 v1;
  if (std::abs(hess.xy) > 1e-300) {
    v1 = Vec2{lo - hess.yy, hess.xy};
  } else {
    v1 = hess.xx <= hess.yy ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  }
  v1 = v1 / norm(v1);
  const Vec2 v2{-v1.y, v1.x};
  Vec2 step;
  if (std::abs(lo) > 1e-10 * scale) step = step + (dot(v1, grad) / lo) * v1;
  if (std::abs(hi) > 1e-10 * scale) step = step + (dot(v2, grad) / hi) * v2;
  return step;
}

struct Refined {
  Vec2 x;
  Jet jet;
};

std::optional<Refined> refine(const Field& field, Vec2 seed, double tol) {
  const double h = field.grid().h();
  Vec2 x = seed;
  std::array<int, 2> patch{};
  for (int it = 0; it <= kNewtonSteps; ++it) {
    if (!field.sampleable(x)) return std::nullopt;
    if (it <= kLockPatchAfter) patch = field.nearest_node(x);
    const Jet jet = field.sample_patch(x, patch[0], patch[1]);
    if (norm(jet.gradient) <= tol) return Refined{x, jet};
    if (it == kNewtonSteps) break;
    auto step = newton_step(jet.hessian, jet.gradient);
    if (!step) return std::nullopt;
    const double len = norm(*step);
    if (len > h) *step = (h / len) * *step;
    x = x - *step;
  }
  return std::nullopt;
}

int hessian_sign(CritClass cls) {
  switch (cls) {
    case CritClass::Max:
    case CritClass::Min:
      return 1;
    case CritClass::Saddle:
      return -1;
    case CritClass::Degenerate:
      return 0;
  }
  return 0;
}

Vec2 ring_center(const Region& region) {
  return region.hole() ? region.hole()->center : Vec2{0.0, 0.0};
}

// Groups candidates whose winding test saw a vanishing gradient into rings.
void extract_rings(CritSet& cs, const Region& region, double h) {
  std::vector<std::size_t> flagged;
  for (std::size_t k = 0; k < cs.points.size(); ++k) {
    if (cs.points[k].index_error == to_string(ErrorCode::GradientTooSmallOnCircle)) {
      flagged.push_back(k);
    }
  }
  if (flagged.size() < static_cast<std::size_t>(kRingMinimum)) return;
  const Vec2 c = ring_center(region);
  std::vector<double> radii;
  for (std::size_t k : flagged) radii.push_back(norm(cs.points[k].x - c));
  std::vector<double> sorted = radii;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];

  std::vector<std::size_t> members;
  std::vector<bool> sector(kRingSectors, false);
  double spread = 0.0;
  for (std::size_t m = 0; m < flagged.size(); ++m) {
    if (std::abs(radii[m] - median) > 3.0 * h) continue;
    const Vec2 d = cs.points[flagged[m]].x - c;
    const double angle = std::atan2(d.y, d.x) + kPi;
    const int s = std::min(kRingSectors - 1, static_cast<int>(angle / (2.0 * kPi) * kRingSectors));
    sector[static_cast<std::size_t>(s)] = true;
    spread = std::max(spread, std::abs(radii[m] - median));
    members.push_back(flagged[m]);
  }
  const int sectors = static_cast<int>(std::count(sector.begin(), sector.end(), true));
  if (members.size() < static_cast<std::size_t>(kRingMinimum) || sectors < kRingMinimum) return;

  cs.rings.push_back(Ring{c, median, spread, static_cast<int>(members.size()), sectors});
  std::vector<CriticalPoint> kept;
  std::size_t next = 0;
  for (std::size_t k = 0; k < cs.points.size(); ++k) {
    if (next < members.size() && members[next] == k) {
      ++next;
      continue;
    }
    kept.push_back(std::move(cs.points[k]));
  }
  cs.points = std::move(kept);
}

// Accumulated angle of the gradient along the circle, or nullopt when an
// increment exceeds pi/2.
std::optional<double> winding(const std::vector<Vec2>& grads) {
  double total = 0.0;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    const Vec2 a = grads[k], b = grads[(k + 1) % grads.size()];
    const double inc = std::atan2(cross(a, b), dot(a, b));
    if (std::abs(inc) > 0.5 * kPi) return std::nullopt;
    total += inc;
  }
  return total;
}

}  // namespace

std::string to_string(CritClass cls) {
  switch (cls) {
    case CritClass::Max:
      return "MAX";
    case CritClass::Min:
      return "MIN";
    case CritClass::Saddle:
      return "SADDLE";
    case CritClass::Degenerate:
      return "DEGENERATE";
  }
  return "DEGENERATE";
}

std::string to_string(AuditStatus status) {
  switch (status) {
    case AuditStatus::Pass:
      return "PASS";
    case AuditStatus::Fail:
      return "FAIL";
    case AuditStatus::Inapplicable:
      return "INAPPLICABLE";
  }
  return "INAPPLICABLE";
}

CritClass classify_hessian(const SymMat2& hessian) {
  const auto [lo, hi] = eigenvalues(hessian);
  const double tau = 1e-4 * std::max(std::abs(lo), std::abs(hi));
  if (!(tau > 0.0)) return CritClass::Degenerate;
  if (hi < -tau) return CritClass::Max;
  if (lo > tau) return CritClass::Min;
  if (hessian.det() < -tau * tau) return CritClass::Saddle;
  return CritClass::Degenerate;
}

nlohmann::json CriticalPoint::to_json() const {
  nlohmann::json j{{"x", x.x},
                   {"y", x.y},
                   {"value", value},
                   {"index", index},
                   {"index_source", index_from_winding ? "winding" : "hessian"},
                   {"class", to_string(cls)},
                   {"grad_norm", grad_norm},
                   {"hess", {hessian.xx, hessian.xy, hessian.yy}}};
  if (!index_error.empty()) j["index_error"] = index_error;
  return j;
}

nlohmann::json CritSet::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : points) arr.push_back(p.to_json());
  return arr;
}

nlohmann::json CritSet::report_json() const {
  nlohmann::json rings_json = nlohmann::json::array();
  for (const auto& r : rings) {
    rings_json.push_back({{"cx", r.center.x},
                          {"cy", r.center.y},
                          {"radius", r.radius},
                          {"spread", r.spread},
                          {"candidates", r.candidates},
                          {"sectors", r.sectors}});
  }
  return {{"points", to_json()},
          {"rings", rings_json},
          {"margin", margin},
          {"dedup_radius", dedup_radius},
          {"diagnostics",
           {{"flagged_cells", diagnostics.flagged_cells},
            {"converged", diagnostics.converged},
            {"nonconvergent", diagnostics.nonconvergent},
            {"outside_margin", diagnostics.outside_margin},
            {"merged", diagnostics.merged}}}};
}

int CritSet::count(CritClass cls) const {
  return static_cast<int>(
      std::count_if(points.begin(), points.end(), [cls](const auto& p) { return p.cls == cls; }));
}

CritSet find_critical_points(const Field& field, double margin) {
  const Grid2D& g = field.grid();
  const double h = g.h();
  if (margin == 0.0) margin = 3.0 * h;
  if (!(margin >= 3.0 * h * (1.0 - 1e-12))) {
    throw Error(ErrorCode::InvalidArgument, "margin must be at least 3h");
  }
  CritSet cs;
  cs.margin = margin;
  cs.dedup_radius = 2.0 * h;

  // Nodal gradients; the refinement tolerance is relative to their sup.
  std::vector<Vec2> grad(g.node_count());
  std::vector<bool> has(g.node_count(), false);
  double sup = 0.0;
  for (const auto& [i, j] : g.unknown_nodes()) {
    if (auto gr = node_gradient(field, i, j)) {
      grad[g.index(i, j)] = *gr;
      has[g.index(i, j)] = true;
      sup = std::max(sup, norm(*gr));
    }
  }
  const double tol = 1e-8 * sup;

  std::vector<Refined> found;
  for (int j = 0; j + 1 < g.ny(); ++j) {
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const std::array<std::size_t, 4> c{g.index(i, j), g.index(i + 1, j), g.index(i, j + 1),
                                         g.index(i + 1, j + 1)};
      if (!std::all_of(c.begin(), c.end(), [&](std::size_t k) { return has[k]; })) continue;
      double gx_lo = INFINITY, gx_hi = -INFINITY, gy_lo = INFINITY, gy_hi = -INFINITY;
      for (std::size_t k : c) {
        gx_lo = std::min(gx_lo, grad[k].x);
        gx_hi = std::max(gx_hi, grad[k].x);
        gy_lo = std::min(gy_lo, grad[k].y);
        gy_hi = std::max(gy_hi, grad[k].y);
      }
      if (gx_lo > 0.0 || gx_hi < 0.0 || gy_lo > 0.0 || gy_hi < 0.0) continue;
      ++cs.diagnostics.flagged_cells;
      const Vec2 seed = g.position(i, j) + Vec2{0.5 * h, 0.5 * h};
      if (auto r = refine(field, seed, tol)) {
        ++cs.diagnostics.converged;
        found.push_back(*r);
      } else {
        ++cs.diagnostics.nonconvergent;
      }
    }
  }

  // Merge in seed order, keeping the smaller gradient of each pair.
  std::vector<Refined> unique;
  for (const Refined& r : found) {
    auto near = std::find_if(unique.begin(), unique.end(), [&](const Refined& u) {
      return norm(u.x - r.x) < cs.dedup_radius;
    });
    if (near == unique.end()) {
      unique.push_back(r);
      continue;
    }
    ++cs.diagnostics.merged;
    if (norm(r.jet.gradient) < norm(near->jet.gradient)) *near = r;
  }

  const Region& region = g.region();
  for (const Refined& r : unique) {
    if (!(region.inner_distance(r.x) >= margin)) {
      ++cs.diagnostics.outside_margin;
      continue;
    }
    CriticalPoint p;
    p.x = r.x;
    p.value = r.jet.value;
    p.grad_norm = norm(r.jet.gradient);
    p.hessian = r.jet.hessian;
    p.cls = classify_hessian(p.hessian);
    try {
      p.index = index_of(field, p.x, default_index_radius(field, p.x));
      p.index_from_winding = true;
    } catch (const Error& e) {
      p.index = hessian_sign(p.cls);
      p.index_error = std::string(to_string(e.code()));
    }
    cs.points.push_back(std::move(p));
  }
  extract_rings(cs, region, h);
  return cs;
}

double default_index_radius(const Field& field, Vec2 x) {
  const Grid2D& g = field.grid();
  const double h = g.h();
  double rho = 4.0 * h;
  if (const auto& hole = g.region().hole()) {
    if (norm(x - hole->center) <= 3.0 * hole->eps) rho = std::max(rho, 0.5 * hole->eps);
  }
  const double room = g.region().inner_distance(x) - 2.0 * h;
  return std::max(h, std::min(rho, room));
}

int index_of(const Field& field, Vec2 x, double rho) {
  const Grid2D& g = field.grid();
  const double h = g.h();
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "circle radius must be positive");
  if (!(g.region().inner_distance(x) - rho >= 2.0 * h * (1.0 - 1e-12))) {
    throw Error(ErrorCode::TooCloseToBoundary, "index circle comes within 2h of a boundary");
  }
  auto gradient_at = [&](double theta) {
    return field.sample_gradient(x + rho * Vec2{std::cos(theta), std::sin(theta)});
  };

  for (int samples : {256, 1024}) {
    std::vector<Vec2> grads(static_cast<std::size_t>(samples));
    const double dtheta = 2.0 * kPi / samples;
    double lo = INFINITY, hi = 0.0;
    std::size_t arg = 0;
    for (int k = 0; k < samples; ++k) {
      grads[static_cast<std::size_t>(k)] = gradient_at(k * dtheta);
      const double m = norm(grads[static_cast<std::size_t>(k)]);
      if (m < lo) {
        lo = m;
        arg = static_cast<std::size_t>(k);
      }
      hi = std::max(hi, m);
    }
    // Sampling alone can step over a zero of the gradient on the circle.
    const auto [theta_min, refined] = boost::math::tools::brent_find_minima(
        [&](double t) { return norm(gradient_at(t)); }, (static_cast<double>(arg) - 1.0) * dtheta,
        (static_cast<double>(arg) + 1.0) * dtheta, 40);
    (void)theta_min;
    lo = std::min(lo, refined);
    if (!(lo >= 1e-3 * hi)) {
      throw Error(ErrorCode::GradientTooSmallOnCircle,
                  "min |grad u| on the circle is below 1e-3 of the max");
    }
    if (auto total = winding(grads)) return static_cast<int>(std::lround(*total / (2.0 * kPi)));
  }
  throw Error(ErrorCode::UnderSampled, "gradient turns more than pi/2 between 1024 samples");
}

nlohmann::json AuditRecord::to_json() const {
  nlohmann::json j{{"index_sum", index_sum},
                   {"target", target},
                   {"status", to_string(status)},
                   {"worst_flux", worst_flux}};
  if (!reason.empty()) j["reason"] = reason;
  return j;
}

AuditRecord poincare_hopf_audit(const CritSet& cs, const Field& field) {
  const Grid2D& g = field.grid();
  const Region& region = g.region();
  const double depth = 4.0 * g.h();
  AuditRecord rec;
  rec.target = region.euler_characteristic();
  rec.worst_flux = -INFINITY;
  std::string violation;
  auto probe = [&](Vec2 at, Vec2 nu) {
    const double flux = dot(field.sample_gradient(at), nu);
    if (flux > rec.worst_flux) rec.worst_flux = flux;
    if (flux >= 0.0 && violation.empty()) {
      violation = "grad u . nu >= 0 at (" + std::to_string(at.x) + ", " + std::to_string(at.y) + ")";
    }
  };
  for (int k = 0; k < kAuditProbes; ++k) {
    const double theta = 2.0 * kPi * k / kAuditProbes;
    const Vec2 b = region.outer().boundary_point(theta);
    const Vec2 nu = region.outer().outward_normal(b);
    probe(b - depth * nu, nu);
    if (const auto& hole = region.hole()) {
      const Vec2 d{std::cos(theta), std::sin(theta)};
      probe(hole->center + (hole->eps + depth) * d, -d);
    }
  }

  for (const auto& p : cs.points) rec.index_sum += p.index;
  if (!violation.empty()) {
    rec.reason = std::string(to_string(ErrorCode::BoundaryConditionViolated)) + ": " + violation;
    return rec;
  }
  if (!cs.rings.empty()) {
    rec.reason = "critical set contains a ring of non-isolated points";
    return rec;
  }
  for (const auto& p : cs.points) {
    if (p.cls == CritClass::Degenerate && !p.index_from_winding) {
      rec.reason = "degenerate point without a winding index";
      return rec;
    }
  }
  rec.status = rec.index_sum == rec.target ? AuditStatus::Pass : AuditStatus::Fail;
  return rec;
}

Pairing persistence_match(const CritSet& cs_eps, const CritSet& cs_0, double d) {
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidArgument, "pairing radius must be positive");
  for (const auto& p : cs_0.points) {
    if (p.cls == CritClass::Degenerate) {
      throw Error(ErrorCode::DegenerateHessian, "reference set holds a degenerate point");
    }
  }
  Pairing out;
  std::vector<bool> used(cs_eps.points.size(), false);
  for (std::size_t r = 0; r < cs_0.points.size(); ++r) {
    std::optional<std::size_t> hit;
    for (std::size_t k = 0; k < cs_eps.points.size(); ++k) {
      if (norm(cs_eps.points[k].x - cs_0.points[r].x) > d) continue;
      if (hit) {
        throw Error(ErrorCode::PairingAmbiguous,
                    "two candidates within d of reference point " + std::to_string(r));
      }
      hit = k;
    }
    if (hit) {
      out.pairs.push_back({r, *hit, norm(cs_eps.points[*hit].x - cs_0.points[r].x)});
      used[*hit] = true;
    } else {
      out.lost.push_back(r);
    }
  }
  for (std::size_t k = 0; k < cs_eps.points.size(); ++k) {
    if (!used[k]) out.extras.push_back(k);
  }
  return out;
}

}  // namespace holepoint
