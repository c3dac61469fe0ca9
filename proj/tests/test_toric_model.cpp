#include <gtest/gtest.h>

#include "mirrorkit/toric_model.hpp"

using namespace mirrorkit;

TEST(ToricModel, CatalogValidates) {
  for (auto& name : catalog_names()) {
    auto m = catalog_model(name);
    EXPECT_EQ(m.name(), name);
    EXPECT_EQ(static_cast<int>(m.vertices().size()), *m.expected_cohomology_dim()) << name;
  }
}

TEST(ToricModel, MoriAndBundleDegrees) {
  auto m = catalog_model("P1xP1");
  EXPECT_EQ(m.mori_degree({2, 3}, 0), 2);
  EXPECT_EQ(m.mori_degree({2, 3}, 3), 3);
  EXPECT_THROW(m.bundle_degree({1, 1}, 0), Error);
  auto b = catalog_model("P1_O(-1)+O(-1)");
  EXPECT_EQ(b.L(), 2);
  EXPECT_EQ(b.bundle_degree({3}, 1), 3);
}

TEST(ToricModel, VerticesOfP2) {
  auto m = catalog_model("P2");
  ASSERT_EQ(m.vertices().size(), 3u);
  EXPECT_EQ(m.vertices()[0].J, std::vector<int>{0});
  EXPECT_EQ(m.vertices()[0].complement, (std::vector<int>{1, 2}));
  for (auto& v : m.vertices()) EXPECT_EQ(v.minor, 1);
}

TEST(ToricModel, FiberChartSpansKernel) {
  for (auto& name : catalog_names()) {
    auto m = catalog_model(name);
    auto& f = m.fiber_parametrization();
    ASSERT_EQ(static_cast<int>(f.fiber.size()), m.fiber_dimension());
    for (auto& row : f.fiber)
      for (int i = 0; i < m.K(); ++i) {
        std::int64_t s = 0;
        for (int j = 0; j < m.N(); ++j) s += m.m(i, j) * row[j];
        EXPECT_EQ(s, 0) << name;
      }
  }
}

TEST(ToricModel, RejectsBadInput) {
  auto expect_kind = [](RawModel r, ErrorKind k) {
    try {
      validate_model(std::move(r));
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), k) << e.what();
    }
  };
  RawModel r;
  r.name = "bad", r.K = 2, r.N = 3, r.weights = {{1, 1, 1}, {2, 2, 2}};
  expect_kind(r, ErrorKind::RankDeficient);
  r.K = 1, r.weights = {{1, 0, 1}};
  expect_kind(r, ErrorKind::ZeroColumn);
  r.weights = {{1, 1, 1}}, r.chamber = std::vector<Rational>{-1};
  expect_kind(r, ErrorKind::EmptyChamber);
  r.weights = {{1, 1, 2}}, r.chamber = std::vector<Rational>{1}, r.smooth = true;
  expect_kind(r, ErrorKind::InvalidArgument);
  EXPECT_THROW(catalog_model("P7"), Error);
}

TEST(ToricModel, WeightedProjectiveNeedsSmoothFlagOff) {
  RawModel r;
  r.name = "P(1,1,2)", r.K = 1, r.N = 3, r.weights = {{1, 1, 2}}, r.chamber = std::vector<Rational>{1};
  auto m = validate_model(r);
  EXPECT_EQ(m.vertices().size(), 3u);
  EXPECT_EQ(m.minor({2}), 2);
}

TEST(Lattice, SmithAndHermite) {
  auto s = smith_normal_form({{2, 4}, {6, 8}});
  ASSERT_EQ(s.invariants.size(), 2u);
  EXPECT_EQ(s.invariants[0], 2);
  EXPECT_EQ(s.invariants[1], 4);
  EXPECT_EQ(determinant(to_rational({{2, 1}, {1, 3}})), 5);
  EXPECT_EQ(rank(to_rational({{1, 2}, {2, 4}})), 1u);
}
