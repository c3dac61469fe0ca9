#include <gtest/gtest.h>

#include "mirrorkit/integrals.hpp"
#include "mirrorkit/series.hpp"

using namespace mirrorkit;

namespace {

Rational factorial(int n) {
  Rational f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

RatFunc q_pochhammer(int n) {
  RatFunc a(1);
  for (int r = 1; r <= n; ++r) a *= RatFunc(1) - RatFunc::q().pow(r);
  return a;
}

}  // namespace

TEST(Series, PointCohomology) {
  auto m = catalog_model("pt");
  auto s = series_H(m, catalog_ring(m, RingMode::cohomology, false), 6);
  const RatFunc z = RatFunc::z();
  for (int d = -6; d <= 6; ++d) {
    RingElement expect = RingElement::zero(s.ring());
    if (d >= 0) expect = RingElement::scalar(s.ring(), (-z).pow(-d) / RatFunc(factorial(d)));
    EXPECT_EQ(s.at({d}), expect) << d;
  }
}

TEST(Series, PointKTheory) {
  auto m = catalog_model("pt");
  auto s = series_K(m, catalog_ring(m, RingMode::k_theory, false), 6);
  for (int d = 0; d <= 6; ++d) EXPECT_EQ(s.at({d}), RingElement::scalar(s.ring(), q_pochhammer(d).inverse())) << d;
  EXPECT_TRUE(s.at({-1}).is_zero());
}

// 1 / prod_{r<=d} (p - r z)^2 = a0 (1 + 2 H_d p / z) mod p^2
TEST(Series, ProjectiveLineCohomologyOracle) {
  auto m = catalog_model("P1");
  auto R = catalog_ring(m, RingMode::cohomology, false);
  auto s = series_H(m, R, 5);
  const RatFunc z = RatFunc::z();
  auto one = RingElement::one(R.ring);
  for (int d = 0; d <= 5; ++d) {
    RatFunc a0 = z.pow(-2 * d) / RatFunc(factorial(d) * factorial(d));
    Rational harmonic = 0;
    for (int r = 1; r <= d; ++r) harmonic += Rational(1, r);
    auto expect = a0 * one + (a0 * RatFunc(2 * harmonic) / z) * R.generators[0];
    EXPECT_EQ(s.at({d}), expect) << d;
  }
  EXPECT_TRUE(s.at({-2}).is_zero());
}

// with P = 1 - h, h^2 = 0: 1 / prod (1 - P q^r)^2 = A (1 - 2 h sum q^r / (1 - q^r))
TEST(Series, ProjectiveLineKTheoryOracle) {
  auto m = catalog_model("P1");
  auto R = catalog_ring(m, RingMode::k_theory, false);
  auto s = series_K(m, R, 4);
  const RatFunc q = RatFunc::q();
  auto one = RingElement::one(R.ring);
  auto h = one - R.generators[0];
  for (int d = 0; d <= 4; ++d) {
    RatFunc A = q_pochhammer(d).pow(-2), sum;
    for (int r = 1; r <= d; ++r) sum += q.pow(r) / (RatFunc(1) - q.pow(r));
    EXPECT_EQ(s.at({d}), A * one - (A * RatFunc(2) * sum) * h) << d;
  }
}

TEST(Series, ProductIsTensorProduct) {
  auto sq = catalog_model("P1xP1");
  auto s = series_H(sq, catalog_ring(sq, RingMode::cohomology, false), 3);
  auto line = series_H(catalog_model("P1"), catalog_ring(catalog_model("P1"), RingMode::cohomology, false), 3);
  // leading coefficients multiply
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b)
      EXPECT_EQ(s.at({a, b}).scalar_part(), line.at({a}).scalar_part() * line.at({b}).scalar_part());
}

TEST(Series, BundleSeriesSupport) {
  auto m = catalog_model("P1_O(-1)+O(-1)");
  auto R = catalog_ring(m, RingMode::k_theory, false);
  auto e = series_E(m, R, 4);
  EXPECT_FALSE(e.at({0}).is_zero());
  EXPECT_TRUE(e.at({-1}).is_zero());
  EXPECT_THROW(series_E(catalog_model("P1"), catalog_ring(catalog_model("P1"), RingMode::k_theory, false), 2), Error);
}

TEST(Series, OutsideBoxRejected) {
  auto m = catalog_model("P1");
  auto s = series_H(m, catalog_ring(m, RingMode::cohomology, false), 2);
  EXPECT_THROW(s.at({3}), Error);
}

// exp(sum X^k / (k (1 - q^k))) = sum X^n / (q; q)_n
TEST(Series, AmplitudeIdentity) { EXPECT_TRUE(amplitude_identity_check(10).pass()); }
