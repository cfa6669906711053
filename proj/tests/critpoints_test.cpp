#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "holepoint/critpoints.hpp"
#include "holepoint/elliptic.hpp"
#include "holepoint/error.hpp"
#include "holepoint/radial.hpp"

namespace holepoint {
namespace {

constexpr double kPi = std::numbers::pi;

Field torsion(const Region& region, double h) {
  const GridPtr g = make_grid(region, h);
  return solve_poisson(g, std::vector<double>(g->unknown_count(), 1.0));
}

ErrorCode index_error(const Field& f, Vec2 x, double rho) {
  try {
    index_of(f, x, rho);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "index_of did not throw";
  return ErrorCode::InvalidArgument;
}

TEST(Classify, HessianClasses) {
  EXPECT_EQ(classify_hessian({-1.0, 0.0, -2.0}), CritClass::Max);
  EXPECT_EQ(classify_hessian({1.0, 0.0, 2.0}), CritClass::Min);
  EXPECT_EQ(classify_hessian({1.0, 0.0, -2.0}), CritClass::Saddle);
  EXPECT_EQ(classify_hessian({1.0, 0.0, 1e-9}), CritClass::Degenerate);
  EXPECT_EQ(classify_hessian({0.0, 0.0, 0.0}), CritClass::Degenerate);
}

TEST(Synthetic, Paraboloid) {
  const auto g = make_grid(LevelSetDomain::disc(1.0), 0.02);
  const Field q = Field::from_function(g, [](Vec2 x) { return x.x * x.x + x.y * x.y; });
  const CritSet cs = find_critical_points(q);
  ASSERT_EQ(cs.points.size(), 1u);
  EXPECT_EQ(cs.points[0].cls, CritClass::Min);
  EXPECT_EQ(cs.points[0].index, 1);
  EXPECT_TRUE(cs.points[0].index_from_winding);
  EXPECT_LT(norm(cs.points[0].x), 1e-10);
  EXPECT_EQ(index_of(q, {0.0, 0.0}, 0.1), 1);
}

TEST(Synthetic, Saddle) {
  const auto g = make_grid(LevelSetDomain::disc(1.0), 0.02);
  const Field q = Field::from_function(g, [](Vec2 x) { return x.x * x.x - x.y * x.y; });
  const CritSet cs = find_critical_points(q);
  ASSERT_EQ(cs.points.size(), 1u);
  EXPECT_EQ(cs.points[0].cls, CritClass::Saddle);
  EXPECT_EQ(cs.points[0].index, -1);
  EXPECT_EQ(index_of(q, {0.0, 0.0}, 0.1), -1);

  const AuditRecord audit = poincare_hopf_audit(cs, q);
  EXPECT_EQ(audit.status, AuditStatus::Inapplicable);
  EXPECT_NE(audit.reason.find("BoundaryConditionViolated"), std::string::npos);
}

TEST(Synthetic, MonkeySaddleWinding) {
  const auto g = make_grid(LevelSetDomain::disc(1.0), 0.01);
  const Field q = Field::from_function(
      g, [](Vec2 x) { return x.x * x.x * x.x - 3.0 * x.x * x.y * x.y; });
  EXPECT_EQ(index_of(q, {0.0, 0.0}, 0.2), -2);
}

TEST(Synthetic, FullRecall) {
  // sin 3x sin 3y on disc(1.3): extrema at (+-pi/6, +-pi/6), saddles at the
  // origin and at (+-pi/3, 0), (0, +-pi/3).
  const auto g = make_grid(LevelSetDomain::disc(1.3), 0.01);
  const Field q =
      Field::from_function(g, [](Vec2 x) { return std::sin(3.0 * x.x) * std::sin(3.0 * x.y); });
  const CritSet cs = find_critical_points(q);
  EXPECT_EQ(cs.count(CritClass::Max), 2);
  EXPECT_EQ(cs.count(CritClass::Min), 2);
  EXPECT_EQ(cs.count(CritClass::Saddle), 5);
  const double a = kPi / 6.0, b = kPi / 3.0;
  const std::vector<Vec2> expected{{a, a}, {-a, a}, {a, -a},  {-a, -a}, {0, 0},
                                   {b, 0}, {-b, 0}, {0, b}, {0, -b}};
  for (Vec2 e : expected) {
    const bool hit = std::any_of(cs.points.begin(), cs.points.end(),
                                 [&](const CriticalPoint& p) { return norm(p.x - e) < 1e-3; });
    EXPECT_TRUE(hit) << e.x << ", " << e.y;
  }
  for (const auto& p : cs.points) {
    EXPECT_TRUE(p.index_from_winding);
    EXPECT_EQ(p.index, p.cls == CritClass::Saddle ? -1 : 1);
  }
}

TEST(Find, RejectsSmallMargin) {
  const auto g = make_grid(LevelSetDomain::disc(1.0), 0.02);
  const Field q = Field::from_function(g, [](Vec2 x) { return x.x * x.x; });
  EXPECT_THROW(find_critical_points(q, 0.05), Error);
}

TEST(Find, JsonLayout) {
  const auto g = make_grid(LevelSetDomain::disc(1.0), 0.02);
  const Field q = Field::from_function(g, [](Vec2 x) { return x.x * x.x - x.y * x.y; });
  const auto j = find_critical_points(q).to_json();
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 1u);
  for (const char* key : {"x", "y", "value", "index", "class", "grad_norm", "hess"}) {
    EXPECT_TRUE(j[0].contains(key)) << key;
  }
  EXPECT_EQ(j[0]["class"], "SADDLE");
  EXPECT_EQ(j[0]["hess"].size(), 3u);
}

TEST(Torsion, DiscHasOneMaximum) {
  const Field u = torsion(LevelSetDomain::disc(1.0), 0.02);
  const CritSet cs = find_critical_points(u);
  ASSERT_EQ(cs.points.size(), 1u);
  EXPECT_EQ(cs.points[0].cls, CritClass::Max);
  EXPECT_LT(norm(cs.points[0].x), 1e-8);
  const AuditRecord audit = poincare_hopf_audit(cs, u);
  EXPECT_EQ(audit.status, AuditStatus::Pass);
  EXPECT_EQ(audit.index_sum, 1);
  EXPECT_LT(audit.worst_flux, 0.0);
}

TEST(Torsion, OffCentreHoleAddsSaddle) {
  const double h = 0.005;
  const Field u = torsion(PuncturedDomain(LevelSetDomain::disc(1.0), {0.3, 0.0}, 0.02), h);
  const CritSet cs = find_critical_points(u);
  ASSERT_EQ(cs.points.size(), 2u);
  EXPECT_EQ(cs.count(CritClass::Max), 1);
  EXPECT_EQ(cs.count(CritClass::Saddle), 1);
  for (const auto& p : cs.points) {
    EXPECT_LE(std::abs(p.x.y), 2.0 * h);
    EXPECT_TRUE(p.index_from_winding);
    EXPECT_EQ(p.index, p.cls == CritClass::Saddle ? -1 : 1);
  }
  const AuditRecord audit = poincare_hopf_audit(cs, u);
  EXPECT_EQ(audit.status, AuditStatus::Pass);
  EXPECT_EQ(audit.target, 0);

  const CritSet ref = find_critical_points(torsion(LevelSetDomain::disc(1.0), h));
  const Pairing pairing = persistence_match(cs, ref, 0.25);
  ASSERT_EQ(pairing.pairs.size(), 1u);
  EXPECT_EQ(cs.points[pairing.pairs[0].perturbed].cls, CritClass::Max);
  ASSERT_EQ(pairing.extras.size(), 1u);
  EXPECT_EQ(cs.points[pairing.extras[0]].cls, CritClass::Saddle);
  EXPECT_TRUE(pairing.lost.empty());
}

TEST(Torsion, IndicesStableUnderRefinement) {
  const PuncturedDomain dom(LevelSetDomain::disc(1.0), {0.3, 0.0}, 0.04);
  const CritSet coarse = find_critical_points(torsion(dom, 0.01));
  const CritSet fine = find_critical_points(torsion(dom, 0.005));
  ASSERT_EQ(coarse.points.size(), fine.points.size());
  const Pairing p = persistence_match(fine, coarse, 0.05);
  ASSERT_EQ(p.pairs.size(), coarse.points.size());
  for (const auto& pair : p.pairs) {
    EXPECT_EQ(coarse.points[pair.reference].index, fine.points[pair.perturbed].index);
  }
}

TEST(Torsion, CentredHoleGivesRing) {
  const double eps = 0.05, h = 0.01;
  const Field u = torsion(PuncturedDomain(LevelSetDomain::disc(1.0), {0.0, 0.0}, eps), h);
  const CritSet cs = find_critical_points(u);
  ASSERT_EQ(cs.rings.size(), 1u);
  EXPECT_TRUE(cs.points.empty());
  EXPECT_GE(cs.rings[0].sectors, 8);
  const double r_eps = solve_radial({2, eps, Nonlinearity::torsion(), 20000}).r_eps;
  EXPECT_NEAR(cs.rings[0].radius, r_eps, 3.0 * h);
  EXPECT_EQ(index_error(u, {cs.rings[0].radius, 0.0}, 4.0 * h), ErrorCode::GradientTooSmallOnCircle);
  EXPECT_EQ(poincare_hopf_audit(cs, u).status, AuditStatus::Inapplicable);
}

TEST(Eigen, CentredAnnulusRingRejectsIndex) {
  const GridPtr g = make_grid(PuncturedDomain(LevelSetDomain::disc(1.0), {0.0, 0.0}, 0.1), 0.02);
  const EigenPair ep = solve_eigen(g);
  const CritSet cs = find_critical_points(ep.phi);
  ASSERT_EQ(cs.rings.size(), 1u);
  EXPECT_EQ(index_error(ep.phi, {0.0, cs.rings[0].radius}, 0.08), ErrorCode::GradientTooSmallOnCircle);
}

TEST(Index, CircleMustClearBoundary) {
  const auto g = make_grid(LevelSetDomain::disc(1.0), 0.02);
  const Field q = Field::from_function(g, [](Vec2 x) { return x.x * x.x + x.y * x.y; });
  EXPECT_EQ(index_error(q, {0.9, 0.0}, 0.1), ErrorCode::TooCloseToBoundary);
  // The circle passes through the minimum.
  EXPECT_EQ(index_error(q, {0.3, 0.0}, 0.3), ErrorCode::GradientTooSmallOnCircle);
}

TEST(Index, DefaultRadius) {
  const auto g = make_grid(PuncturedDomain(LevelSetDomain::disc(1.0), {0.3, 0.0}, 0.1), 0.01);
  const Field q = Field::from_function(g, [](Vec2 x) { return x.x; });
  EXPECT_DOUBLE_EQ(default_index_radius(q, {-0.5, 0.0}), 0.04);
  EXPECT_DOUBLE_EQ(default_index_radius(q, {0.3, 0.25}), 0.05);
  // Clamped to keep 2h from the hole.
  EXPECT_NEAR(default_index_radius(q, {0.3, 0.14}), 0.02, 1e-12);
}

CritSet manual(std::vector<Vec2> xs, CritClass cls) {
  CritSet cs;
  for (Vec2 x : xs) {
    CriticalPoint p;
    p.x = x;
    p.cls = cls;
    cs.points.push_back(p);
  }
  return cs;
}

TEST(Persistence, EmptyReference) {
  const CritSet eps = manual({{0.0, 0.0}, {0.5, 0.0}}, CritClass::Max);
  const Pairing p = persistence_match(eps, CritSet{}, 0.1);
  EXPECT_TRUE(p.pairs.empty());
  EXPECT_EQ(p.extras.size(), 2u);
}

TEST(Persistence, Ambiguous) {
  const CritSet eps = manual({{0.0, 0.0}, {0.05, 0.0}}, CritClass::Max);
  const CritSet ref = manual({{0.01, 0.0}}, CritClass::Max);
  try {
    persistence_match(eps, ref, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PairingAmbiguous);
  }
}

TEST(Persistence, DegenerateReference) {
  const CritSet ref = manual({{0.0, 0.0}}, CritClass::Degenerate);
  EXPECT_THROW(persistence_match(CritSet{}, ref, 0.1), Error);
}

TEST(Persistence, LostPoint) {
  const CritSet eps = manual({{0.5, 0.0}}, CritClass::Max);
  const CritSet ref = manual({{0.0, 0.0}}, CritClass::Max);
  const Pairing p = persistence_match(eps, ref, 0.1);
  EXPECT_EQ(p.lost.size(), 1u);
  EXPECT_EQ(p.extras.size(), 1u);
}

}  // namespace
}  // namespace holepoint
