#include <gtest/gtest.h>

#include <random>

#include "mirrorkit/ring.hpp"

using namespace mirrorkit;

namespace {

RingElement random_element(const RingPtr& R, std::mt19937_64& g, bool unit) {
  std::uniform_int_distribution<int> d(-5, 5);
  std::vector<RatFunc> c(R->dim());
  const RatFunc q = RatFunc::q();
  for (auto& x : c) x = RatFunc(d(g)) + RatFunc(d(g)) * q;
  if (unit) c[R->unit_index()] = RatFunc(3) + q * q;
  return RingElement(R, c);
}

}  // namespace

TEST(Ring, CohomologyRelations) {
  auto P2 = catalog_ring(catalog_model("P2"), RingMode::cohomology, false);
  auto p = P2.generators[0];
  EXPECT_FALSE(p.pow(2).is_zero());
  EXPECT_TRUE(p.pow(3).is_zero());
  for (auto& u : P2.divisors) EXPECT_EQ(u, p);
  EXPECT_TRUE(P2.ring->nilpotent_augmentation());
}

TEST(Ring, KTheoryRelations) {
  auto P1 = catalog_ring(catalog_model("P1"), RingMode::k_theory, false);
  auto one = RingElement::one(P1.ring);
  auto h = one - P1.generators[0];
  EXPECT_FALSE(h.is_zero());
  EXPECT_TRUE(h.pow(2).is_zero());
  EXPECT_THROW(h.inverse(), Error);
}

TEST(Ring, EquivariantCohomologyRelation) {
  auto R = catalog_ring(catalog_model("P1"), RingMode::cohomology, true);
  auto prod = R.divisors[0] * R.divisors[1];
  EXPECT_TRUE(prod.is_zero());
  EXPECT_FALSE(R.divisors[0].is_zero());
}

// a * a^{-1} = 1 for random units
TEST(Ring, RandomInverses) {
  std::mt19937_64 g(11);
  for (auto [name, mode, eq] : {std::tuple{"P2", RingMode::k_theory, false}, std::tuple{"P1xP1", RingMode::cohomology, false},
                                std::tuple{"P1", RingMode::k_theory, true}, std::tuple{"P2", RingMode::cohomology, true}}) {
    auto R = catalog_ring(catalog_model(name), mode, eq);
    for (int k = 0; k < 4; ++k) {
      auto a = random_element(R.ring, g, true);
      EXPECT_EQ(a * a.inverse(), RingElement::one(R.ring)) << name;
    }
  }
}

TEST(Ring, Associativity) {
  std::mt19937_64 g(12);
  for (auto [mode, eq] : {std::pair{RingMode::k_theory, false}, std::pair{RingMode::cohomology, true}}) {
    auto R = catalog_ring(catalog_model("P1xP1"), mode, eq);
    for (int k = 0; k < 3; ++k) {
      auto a = random_element(R.ring, g, false), b = random_element(R.ring, g, false), c = random_element(R.ring, g, false);
      EXPECT_EQ((a * b) * c, a * (b * c));
      EXPECT_EQ(a * (b + c), a * b + a * c);
      EXPECT_EQ(a * b, b * a);
    }
  }
}

TEST(Ring, ScalarRingIsOneDimensional) {
  auto m = catalog_model("P2");
  auto R = scalar_ring(m, RingMode::k_theory, true);
  EXPECT_EQ(R.ring->dim(), 1u);
  EXPECT_EQ(R.generators.size(), 1u);
  EXPECT_EQ(R.generators[0], RingElement::one(R.ring));
}

TEST(Ring, MismatchedRingsRejected) {
  auto a = catalog_ring(catalog_model("P1"), RingMode::cohomology, false);
  auto b = catalog_ring(catalog_model("P2"), RingMode::cohomology, false);
  EXPECT_THROW(a.generators[0] + b.generators[0], Error);
}
