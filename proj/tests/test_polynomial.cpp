#include <gtest/gtest.h>

#include <random>

#include "mirrorkit/expression.hpp"
#include "mirrorkit/rational_function.hpp"

using namespace mirrorkit;

namespace {

Poly random_poly(std::mt19937_64& g, const std::vector<int>& vars, int terms, int max_exp) {
  Poly p;
  std::uniform_int_distribution<int> coef(-9, 9), ex(0, max_exp);
  for (int t = 0; t < terms; ++t) {
    Poly m(Rational(coef(g)));
    for (int v : vars) m = m * Poly::variable(v, ex(g));
    p += m;
  }
  return p;
}

bool associates(const Poly& a, const Poly& b) { return a == b || a == -b; }

}  // namespace

TEST(Polynomial, ArithmeticAndEvaluation) {
  Poly q = Poly::variable(var::q), z = Poly::variable(var::z);
  Poly a = (q + Poly(1)) * (q - Poly(1));
  EXPECT_EQ(a, q * q - Poly(1));
  EXPECT_EQ(a.degree_in(var::q), 2);
  EXPECT_EQ((q + z).pow(2), q * q + (q * z).scaled(2) + z * z);
  std::map<int, Rational> at{{var::q, Rational(3)}};
  EXPECT_EQ(a.evaluate(at), Rational(8));
}

TEST(Polynomial, ExactAndTrialDivision) {
  Poly q = Poly::variable(var::q), L = Poly::variable(var::Lambda(1));
  Poly f = q * q - L * L, g = q - L;
  EXPECT_EQ(f.exact_div(g), q + L);
  EXPECT_TRUE(f.try_div(g).has_value());
  EXPECT_FALSE(f.try_div(q + Poly(2)).has_value());
  EXPECT_THROW(f.exact_div(q + Poly(2)), Error);
}

TEST(Polynomial, GcdKnownFactor) {
  Poly q = Poly::variable(var::q), L = Poly::variable(var::Lambda(1));
  Poly common = q * L - Poly(3);
  Poly a = common * (q + Poly(1)).pow(2), b = common * (L - q);
  EXPECT_TRUE(associates(gcd(a, b).primitive_integer(), common));
}

// the heuristic gcd must agree with the subresultant route on random inputs
TEST(Polynomial, HeuristicGcdMatchesPrs) {
  std::mt19937_64 g(7);
  const std::vector<int> vars{var::q, var::Lambda(1), var::Lambda(2)};
  for (int trial = 0; trial < 40; ++trial) {
    Poly c = random_poly(g, vars, 3, 2), a = random_poly(g, vars, 3, 2), b = random_poly(g, vars, 3, 2);
    if (c.is_zero() || a.is_zero() || b.is_zero()) continue;
    Poly x = a * c, y = b * c;
    Poly h = detail::gcd_integer(x, y), p = detail::gcd_prs(x, y);
    EXPECT_TRUE(associates(h.primitive_integer(), p.primitive_integer())) << x.to_string() << " | " << y.to_string();
    EXPECT_TRUE(x.try_div(h).has_value());
    EXPECT_TRUE(y.try_div(h).has_value());
  }
}

TEST(RationalFunction, NormalFormIsCanonical) {
  RatFunc q = RatFunc::q();
  RatFunc a = (q * q - RatFunc(1)) / (q - RatFunc(1));
  EXPECT_EQ(a, q + RatFunc(1));
  RatFunc b = RatFunc(1) / (RatFunc(1) - q) + RatFunc(1) / (RatFunc(1) + q);
  EXPECT_EQ(b, RatFunc(2) / (RatFunc(1) - q * q));
  EXPECT_THROW(RatFunc(1) / RatFunc(0), Error);
}

TEST(RationalFunction, CommonDenominator) {
  RatFunc q = RatFunc::q();
  std::vector<RatFunc> v{RatFunc(1) / (RatFunc(1) - q), q / (RatFunc(1) - q * q), RatFunc(2)};
  auto [nums, den] = over_common_denominator(v);
  for (std::size_t k = 0; k < v.size(); ++k) EXPECT_EQ(RatFunc(nums[k], den), v[k]);
  EXPECT_EQ(den.degree_in(var::q), 2);
}

TEST(Expression, ParsesVariablesAndPowers) {
  RatFunc q = RatFunc::q(), z = RatFunc::z();
  EXPECT_EQ(parse_ratfunc("(1 - q^2)/(1-q)"), RatFunc(1) + q);
  EXPECT_EQ(parse_ratfunc("2*p1^2 - lam1"), RatFunc::variable(var::p(1)).pow(2).scaled(2) - RatFunc::variable(var::lambda(1)));
  EXPECT_EQ(parse_ratfunc("q^-1 * z"), z / q);
  EXPECT_EQ(parse_ratfunc("3/4"), RatFunc(Rational(3, 4)));
  EXPECT_THROW(parse_ratfunc("1 +"), Error);
  EXPECT_THROW(parse_ratfunc("w"), Error);
}
