#include <gtest/gtest.h>

#include <cmath>

#include "mirrorkit/integrals.hpp"

using namespace mirrorkit;

namespace {

IntegralSpec h_spec(double Q, double z) {
  IntegralSpec s;
  s.Q = {Q};
  s.z = z;
  return s;
}

IntegralSpec k_spec(double Q, double q, double radius) {
  IntegralSpec s;
  s.kind = IntegralKind::k_theoretic;
  s.Q = {Q};
  s.q = q;
  s.radius = radius;
  return s;
}

// sum_n Q^n / (q; q)_n^2
double constant_term(double Q, double q) {
  double sum = 0, term = 1;
  for (int n = 0; n < 200; ++n) {
    sum += term;
    double poch = 1 - std::pow(q, n + 1);
    term *= Q / (poch * poch);
  }
  return sum;
}

}  // namespace

// int exp(-(t + Q/t)/z) dt/t = 2 K_0(2 sqrt(Q) / z)
TEST(Integrals, BesselOracle) {
  auto m = catalog_model("P1");
  for (auto [Q, z] : {std::pair{1.0, 0.5}, std::pair{0.3, 1.2}, std::pair{2.0, 0.15}}) {
    auto v = eval_integral_H(m, h_spec(Q, z));
    double expect = 2 * std::cyl_bessel_k(0.0, 2 * std::sqrt(Q) / z);
    EXPECT_NEAR(v.value.real() / expect, 1, 1e-11);
    EXPECT_NEAR(v.value.imag(), 0, 1e-14);
  }
  // frozen: 2 K_0(4)
  EXPECT_NEAR(eval_integral_H(m, h_spec(1.0, 0.5)).value.real(), 0.022319352171706048, 1e-14);
}

TEST(Integrals, ScalingLaw) {
  auto m = catalog_model("P1");
  for (double c : {2.0, 0.5, 3.0}) {
    cplx a = eval_integral_H(m, h_spec(0.8, 0.4)).value, b = eval_integral_H(m, h_spec(0.8 / (c * c), 0.4 / c)).value;
    EXPECT_NEAR(std::abs(a / b - 1.0), 0, 1e-11);
  }
}

TEST(Integrals, CircleConstantTerm) {
  auto m = catalog_model("P1");
  for (auto [Q, q] : {std::pair{0.1, 0.5}, std::pair{0.02, 0.3}}) {
    auto v = eval_integral_K(m, k_spec(Q, q, 0.5));
    EXPECT_NEAR(v.value.real() / constant_term(Q, q), 1, 1e-12);
  }
  auto pt = eval_integral_K(catalog_model("pt"), k_spec(0.2, 0.5, 1));
  double expect = 1;
  for (int r = 0; r < 200; ++r) expect /= 1 - 0.2 * std::pow(0.5, r);
  EXPECT_NEAR(pt.value.real(), expect, 1e-13);
}

TEST(Integrals, GaussianCalibration) {
  auto g = gaussian_calibration(0.1);
  EXPECT_NEAR(g.constant, std::sqrt(2 * kPi), 1e-10);
}

TEST(Integrals, EquationResiduals) {
  auto m = catalog_model("P1");
  EXPECT_LT(check_equation_numeric(m, k_spec(0.1, 0.5, 0.5)).residual, 1e-8);
  EXPECT_LT(check_equation_numeric(m, k_spec(0.02, 0.3, 0.4)).residual, 1e-8);
  EXPECT_LT(check_equation_numeric(m, h_spec(1.0, 0.3)).residual, 1e-6);
}

TEST(Integrals, StationaryPhaseHalving) {
  auto t = stationary_phase_compare(catalog_model("P1"), {cplx(1)}, {0.2, 0.1});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_NEAR(t.rows[1].deviation / t.rows[0].deviation, 0.5, 0.05);
}

TEST(Integrals, Failures) {
  auto m = catalog_model("P1");
  EXPECT_THROW(eval_integral_H(m, h_spec(1.0, -0.5)), Error);
  EXPECT_THROW(eval_integral_K(m, k_spec(0.1, 1.5, 0.5)), Error);
  try {
    eval_integral_K(m, k_spec(0.1, 0.5, 1.0));
    ADD_FAILURE() << "pole on contour accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PoleOnContour);
  }
  EXPECT_THROW(stationary_phase_compare(catalog_model("P2"), {cplx(1)}, {0.1}), Error);
  try {
    eval_integral_K(catalog_model("P2"), k_spec(0.01, 0.4, 0.3));
    ADD_FAILURE() << "fiber dimension 2 accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedDimension);
  }
}
