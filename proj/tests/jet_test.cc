#include "cascade/jet.h"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"

using namespace cascade;

namespace {

// exp(x^2) erfc(x) in extended precision; fine for |x| <= 25.
long double erfcx_reference(long double x) { return std::exp(x * x) * std::erfc(x); }

}  // namespace

TEST(TaylorJet, variable_and_arithmetic) {
  const TaylorJet x = TaylorJet::variable(4, 0.0);
  // 1/(1-x) = 1 + x + x^2 + ...
  const TaylorJet geometric = TaylorJet(4, 1.0) / (1.0 - x);
  for (std::size_t k = 0; k <= 4; ++k) EXPECT_NEAR(geometric[k], 1.0, 1e-15);
  // (1+x)^3
  const TaylorJet cube = (1.0 + x) * (1.0 + x) * (1.0 + x);
  EXPECT_DOUBLE_EQ(cube[0], 1.0);
  EXPECT_DOUBLE_EQ(cube[1], 3.0);
  EXPECT_DOUBLE_EQ(cube[2], 3.0);
  EXPECT_DOUBLE_EQ(cube[3], 1.0);
  EXPECT_DOUBLE_EQ(cube[4], 0.0);
  EXPECT_DOUBLE_EQ(cube.derivative(2), 6.0);
}

TEST(TaylorJet, exp_matches_series) {
  const double x0 = 0.7;
  const TaylorJet e = exp(2.0 * TaylorJet::variable(6, x0));
  double factorial = 1.0;
  for (std::size_t k = 0; k <= 6; ++k) {
    if (k > 0) factorial *= static_cast<double>(k);
    EXPECT_NEAR(e[k], std::pow(2.0, k) * std::exp(2.0 * x0) / factorial, 1e-13 * e[k]);
  }
}

TEST(TaylorJet, erfc_derivatives_match_hermite_form) {
  // d^k/dx^k erfc(x) = (-1)^k (2/sqrt(pi)) H_{k-1}(x) exp(-x^2), k >= 1.
  const double x0 = 0.9;
  const TaylorJet f = erfc(TaylorJet::variable(5, x0));
  const double h[] = {1.0, 2.0 * x0, 4.0 * x0 * x0 - 2.0, 8.0 * std::pow(x0, 3) - 12.0 * x0,
                      16.0 * std::pow(x0, 4) - 48.0 * x0 * x0 + 12.0};
  EXPECT_NEAR(f.value(), std::erfc(x0), 1e-16);
  for (std::size_t k = 1; k <= 5; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double expected = sign * 2.0 / std::sqrt(std::numbers::pi) * h[k - 1] * std::exp(-x0 * x0);
    EXPECT_NEAR(f.derivative(k), expected, 1e-13 * std::max(1.0, std::abs(expected))) << "k=" << k;
  }
  const TaylorJet g = erf(TaylorJet::variable(5, x0));
  for (std::size_t k = 0; k <= 5; ++k) {
    EXPECT_NEAR(g[k] + f[k], k == 0 ? 1.0 : 0.0, 1e-15);
  }
}

TEST(Erfcx, scalar_matches_extended_precision) {
  for (double x = -5.0; x <= 25.0; x += 0.37) {
    const long double ref = erfcx_reference(x);
    EXPECT_NEAR(erfcx(x), static_cast<double>(ref), 2e-14 * static_cast<double>(ref)) << "x=" << x;
  }
}

TEST(Erfcx, asymptotic_regime) {
  // erfcx(x) ~ 1/(x sqrt(pi)) sum_k (-1)^k (2k-1)!! / (2x^2)^k.
  for (double x : {50.0, 1e3, 1e6}) {
    const double y = 1.0 / (2.0 * x * x);
    const double sum = 1.0 - y + 3.0 * y * y - 15.0 * std::pow(y, 3) + 105.0 * std::pow(y, 4);
    const double series = sum / (x * std::sqrt(std::numbers::pi));
    EXPECT_NEAR(erfcx(x), series, 1e-10 * series);
  }
}

TEST(Erfcx, jet_matches_product_form) {
  // Jet of erfcx(2x) around x0 against exp(u^2) * erfc(u) built from jets.
  const double x0 = 1.3;
  const TaylorJet u = 2.0 * TaylorJet::variable(4, x0);
  const TaylorJet direct = erfcx(u);
  const TaylorJet product = exp(u * u) * erfc(u);
  for (std::size_t k = 0; k <= 4; ++k) {
    EXPECT_NEAR(direct[k], product[k], 1e-12 * std::max(1.0, std::abs(product[k]))) << "k=" << k;
  }
  EXPECT_NEAR(direct.value(), static_cast<double>(erfcx_reference(2.0L * x0)), 1e-15);
}

TEST(Erfcx, jet_negative_argument) {
  const TaylorJet u = TaylorJet::variable(3, -2.0);
  const TaylorJet direct = erfcx(u);
  const TaylorJet product = exp(u * u) * erfc(u);
  for (std::size_t k = 0; k <= 3; ++k) {
    EXPECT_NEAR(direct[k], product[k], 1e-11 * std::max(1.0, std::abs(product[k])));
  }
}
