#include <gtest/gtest.h>

#include <algorithm>

#include "mirrorkit/critical.hpp"

using namespace mirrorkit;

namespace {

std::vector<cplx> sorted_p(const LagrangianSample& s) {
  std::vector<cplx> v;
  for (auto& pt : s.points) v.push_back(pt.p[0]);
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return v;
}

}  // namespace

TEST(Critical, ProjectiveLineClosedForm) {
  auto s = critical_points_H(catalog_model("P1"), {cplx(0.36)});
  auto p = sorted_p(s);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_NEAR(std::abs(p[0] + 0.6), 0, 1e-12);
  EXPECT_NEAR(std::abs(p[1] - 0.6), 0, 1e-12);
  for (auto& pt : s.points) {
    EXPECT_NEAR(std::abs(*pt.hessian - 2.0 * pt.p[0]), 0, 1e-12);
    EXPECT_NEAR(std::abs(*pt.value - 2.0 * pt.p[0]), 0, 1e-12);
    EXPECT_LT(pt.residual, 1e-10);
  }
}

TEST(Critical, SeedDoublingIsStable) {
  auto m = catalog_model("P1xP1");
  SolverConfig a, b;
  b.seeds = 2 * a.seeds;
  b.rng_seed = a.rng_seed + 1;
  auto sa = critical_points_H(m, {cplx(0.7, 0.2), cplx(1.3, -0.4)}, {}, a);
  auto sb = critical_points_H(m, {cplx(0.7, 0.2), cplx(1.3, -0.4)}, {}, b);
  ASSERT_EQ(sa.points.size(), 4u);
  ASSERT_EQ(sb.points.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_LT(detail::distance(sa.points[k].p, sb.points[k].p), 1e-9);
}

TEST(Critical, EquivariantPointsCount) {
  auto s = critical_points_H(catalog_model("P2"), {cplx(0.5)}, {cplx(0.1), cplx(-0.2, 0.3), cplx(0.4)});
  EXPECT_EQ(s.points.size(), 3u);
}

TEST(Critical, HessianFormulaMatchesDirect) {
  auto m = catalog_model("P1xP1");
  auto s = critical_points_H(m, {cplx(0.4, 0.1), cplx(2.0)});
  for (auto& pt : s.points) {
    cplx f = hessian_formula(m, pt.p);
    EXPECT_LT(std::abs(f - hessian_direct(m, pt)) / std::abs(f), 1e-8);
  }
}

// (phi, psi) = sum phi psi / Delta; for P1 at lambda = 0 this is a residue sum over p^2 = Q
TEST(Critical, ResiduePairingValues) {
  auto m = catalog_model("P1");
  const cplx Q(0.3, 0.1);
  auto s = critical_points_H(m, {Q});
  auto pair = [&](const char* phi, const char* psi) { return residue_pairing(m, s, parse_ratfunc(phi), parse_ratfunc(psi)).value; };
  EXPECT_LT(std::abs(pair("1", "1")), 1e-12);
  EXPECT_LT(std::abs(pair("p1", "1") - 1.0), 1e-12);
  EXPECT_LT(std::abs(pair("p1^3", "1") - Q), 1e-12);
  auto p2 = catalog_model("P2");
  auto t = critical_points_H(p2, {Q});
  EXPECT_LT(std::abs(residue_pairing(p2, t, parse_ratfunc("p1^2"), parse_ratfunc("1")).value - 1.0), 1e-12);
  EXPECT_LT(std::abs(residue_pairing(p2, t, parse_ratfunc("p1^4"), parse_ratfunc("p1")).value - Q), 1e-12);
}

TEST(Critical, KTheoreticPointsLieOnLm) {
  auto m = catalog_model("P2");
  for (int order : {1, 2, 3}) {
    auto s = critical_points_K(m, {cplx(0.25)}, order);
    EXPECT_FALSE(s.points.empty());
    for (auto& pt : s.points) EXPECT_LT(lm_residual(m, pt.p, pt.Q, order), 1e-9);
  }
}

TEST(Critical, AdamsImageInstance) {
  auto m = catalog_model("P1");
  EXPECT_LT(lm_residual(m, {3}, {8}, 2), 1e-12);
  auto img = adams_image(m, {3}, {8}, 2, 1e-9);
  EXPECT_TRUE(img.pass);
  EXPECT_EQ(img.Pm[0], cplx(9));
  EXPECT_EQ(img.Qm[0], cplx(64));
}

TEST(Critical, MoriFilterCounts) {
  for (auto [name, n] : {std::pair{"P1", 2}, std::pair{"P2", 3}, std::pair{"P1xP1", 4}}) {
    auto m = catalog_model(name);
    auto part = mori_limit_filter(m, critical_points_H(m, std::vector<cplx>(m.K(), cplx(1))));
    EXPECT_EQ(part.bounded, n) << name;
    EXPECT_EQ(part.escaping, 0) << name;
  }
}

TEST(Critical, ClassicalPointsOfP1) {
  auto pts = classical_points(catalog_model("P1"), {cplx(0.3), cplx(-0.5)});
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_LT(std::abs(pts[0].p[0] - 0.3), 1e-14);
  EXPECT_LT(std::abs(pts[0].hessian - cplx(0.8)), 1e-14);
}

TEST(Critical, BadArguments) {
  auto m = catalog_model("P1xP1");
  EXPECT_THROW(critical_points_H(m, {cplx(1)}), Error);
  EXPECT_THROW(critical_points_K(m, {cplx(1), cplx(1)}, 0), Error);
  auto k = critical_points_K(catalog_model("P1"), {cplx(0.25)}, 1);
  EXPECT_THROW(residue_pairing(catalog_model("P1"), k, RatFunc(1), RatFunc(1)), Error);
}
