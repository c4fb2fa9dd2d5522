#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stlaws/quadrature.hpp"

using namespace stlaws;

TEST(Quadrature, ExactForLowDegreePolynomials) {
  const auto r = quad::integrate([](double x) { return 5 * x * x * x * x - 3 * x + 1; }, -1.0, 2.0);
  EXPECT_NEAR(r.value, 33.0 - 4.5 + 3.0, 1e-12);
  EXPECT_EQ(r.evaluations, 15);
}

TEST(Quadrature, SmoothOscillatory) {
  const auto r = quad::integrate([](double x) { return std::cos(40 * x); }, 0.0, 3.0);
  EXPECT_NEAR(r.value, std::sin(120.0) / 40.0, 1e-10);
}

TEST(Quadrature, EndpointSingularities) {
  const auto inv_sqrt = quad::integrate_endpoint_singular([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  EXPECT_NEAR(inv_sqrt.value, 2.0, 1e-8);
  const auto arcsine = quad::integrate_endpoint_singular(
      [](double x) { return 1.0 / (std::numbers::pi * std::sqrt(1 - x * x)); }, -1.0, 1.0);
  EXPECT_NEAR(arcsine.value, 1.0, 1e-8);
  const auto log = quad::integrate_endpoint_singular([](double x) { return -std::log(x); }, 0.0, 1.0);
  EXPECT_NEAR(log.value, 1.0, 1e-8);
}

TEST(Quadrature, EmptyRange) { EXPECT_EQ(quad::integrate([](double) { return 1.0; }, 2.0, 2.0).value, 0.0); }

TEST(Quadrature, DivergentIntegralThrows) {
  EXPECT_THROW(quad::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0), NumericError);
  EXPECT_THROW(quad::integrate([](double) { return std::nan(""); }, 0.0, 1.0), NumericError);
}
