#include <gtest/gtest.h>

#include "mirrorkit/operators.hpp"

using namespace mirrorkit;

namespace {

void expect_same_on_box(const TruncatedSeries& a, const TruncatedSeries& b, int r) {
  for (auto& d : box_degrees(a.K(), r)) EXPECT_EQ(a.at(d), b.at(d));
}

}  // namespace

// T^v Q^e = q^{<v,e>} Q^e T^v
TEST(Operators, CommutationRule) {
  auto m = catalog_model("P1xP1");
  auto R = catalog_ring(m, RingMode::k_theory, false);
  auto s = series_K(m, R, 4);
  const std::vector<int> v{1, 2}, e{1, 1};
  auto lhs = ShiftOperator::translation(v).compose(ShiftOperator::novikov_monomial(e)).apply(s);
  auto swapped = ShiftOperator::novikov_monomial(e).compose(ShiftOperator::translation(v, RatFunc::q().pow(3))).apply(s);
  expect_same_on_box(lhs, swapped, 2);
}

TEST(Operators, SystemsAnnihilateSeries) {
  for (auto name : {"P1", "P2", "P1xP1"}) {
    auto m = catalog_model(name);
    auto H = catalog_ring(m, RingMode::cohomology, false);
    auto K = catalog_ring(m, RingMode::k_theory, false);
    EXPECT_TRUE(verify(build_system_H(m, Representation::vector, &H), series_H(m, H, 4)).pass()) << name;
    EXPECT_TRUE(verify(build_system_K(m, Representation::vector, &K), series_K(m, K, 4)).pass()) << name;
  }
}

TEST(Operators, PerturbedSeriesFails) {
  auto m = catalog_model("P2");
  auto R = catalog_ring(m, RingMode::k_theory, false);
  auto s = series_K(m, R, 4);
  s.set({2}, s.at({2}) + RingElement::one(R.ring));
  auto rep = verify(build_system_K(m, Representation::vector, &R), s);
  EXPECT_FALSE(rep.pass());
  EXPECT_GT(rep.failures(), 0u);
}

TEST(Operators, EquivariantSystems) {
  auto m = catalog_model("P1");
  auto H = catalog_ring(m, RingMode::cohomology, true);
  auto K = catalog_ring(m, RingMode::k_theory, true);
  EXPECT_TRUE(verify(build_system_H(m, Representation::vector, &H), series_H(m, H, 4)).pass());
  EXPECT_TRUE(verify(build_system_K(m, Representation::vector, &K), series_K(m, K, 3)).pass());
  auto p2 = catalog_model("P2");
  auto S = scalar_ring(p2, RingMode::k_theory, true);
  EXPECT_TRUE(verify(build_system_K(p2, Representation::vector, &S), series_K(p2, S, 4)).pass());
}

TEST(Operators, BundleReadings) {
  auto m = catalog_model("P1_O(-1)+O(-1)");
  auto R = catalog_ring(m, RingMode::k_theory, false);
  auto pie = series_PiE(m, R, 4);
  EXPECT_TRUE(verify(build_system_PiE(m, R), pie).pass());
  EXPECT_FALSE(verify(build_system_PiE(m, R, BundleReading::as_displayed), pie).pass());
  EXPECT_TRUE(verify(build_system_E(m, R), series_E(m, R, 4)).pass());
}

TEST(Operators, PrintedSystemMentionsShifts) {
  auto m = catalog_model("P1");
  auto sys = build_system_K(m, Representation::scalar);
  ASSERT_EQ(sys.equations.size(), 1u);
  EXPECT_NE(sys.equations[0].to_string().find("T"), std::string::npos);
}
