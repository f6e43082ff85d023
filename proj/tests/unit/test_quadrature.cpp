#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "asymlab/error.hpp"
#include "asymlab/quadrature.hpp"

using namespace asymlab;

namespace {
constexpr double kInfinity = std::numeric_limits<double>::infinity();
}

TEST(GaussKronrod, SmoothIntegrals) {
    const auto r = gauss_kronrod([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-14);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 2.0, 1e-14);
    const auto g = gauss_kronrod([](double x) { return std::exp(-x * x); }, -6.0, 6.0, 1e-14);
    EXPECT_NEAR(g.value, std::sqrt(std::numbers::pi) * std::erf(6.0), 1e-14);
}

TEST(GaussKronrod, EndpointSingularityIsResolvedAdaptively) {
    const auto r = gauss_kronrod([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-12);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-11);
    EXPECT_GE(r.error, 0.0);
}

TEST(GaussKronrod, ReversedIntervalChangesSign) {
    const auto f = [](double x) { return x * x; };
    EXPECT_NEAR(gauss_kronrod(f, 2.0, 0.0, 1e-14).value, -8.0 / 3.0, 1e-13);
}

TEST(ImproperQuadrature, ConvergentPowerSingularity) {
    // ∫_0^1 x^{-1/2} dx = 2; the gap argument is x itself.
    const auto out = improper_quadrature([](double, double gap) { return 1.0 / std::sqrt(gap); }, {0.0, 1.0},
                                         SingularEnd::Lower, 1e-10);
    EXPECT_FALSE(out.divergent);
    EXPECT_NEAR(out.value, 2.0, 1e-8);
}

TEST(ImproperQuadrature, UpperSingularEndUsesGap) {
    // ∫_0^1 (1 - x)^{-0.7} dx = 1 / 0.3.
    const auto out = improper_quadrature([](double, double gap) { return std::pow(gap, -0.7); }, {0.0, 1.0},
                                         SingularEnd::Upper, 1e-10);
    EXPECT_FALSE(out.divergent);
    EXPECT_NEAR(out.value, 1.0 / 0.3, 1e-7);
}

TEST(ImproperQuadrature, DetectsLogarithmicDivergence) {
    const auto out = improper_quadrature([](double, double gap) { return 1.0 / gap; }, {0.0, 1.0},
                                         SingularEnd::Lower, 1e-10);
    EXPECT_TRUE(out.divergent);
    EXPECT_NEAR(out.exponent, 1.0, 0.05);
    // Partial sums grow like ln 2 per dyadic level.
    ASSERT_GE(out.partial_sums.size(), 2u);
    const auto& a = out.partial_sums[out.partial_sums.size() - 2];
    const auto& b = out.partial_sums.back();
    EXPECT_NEAR(b.second - a.second, std::log(2.0), 1e-6);
}

TEST(ImproperQuadrature, InfiniteEnd) {
    const auto out = improper_quadrature([](double x, double) { return std::exp(-x); }, {1.0, kInfinity},
                                         SingularEnd::Upper, 1e-12);
    EXPECT_FALSE(out.divergent);
    EXPECT_NEAR(out.value, std::exp(-1.0), 1e-10);
    const auto div = improper_quadrature([](double x, double) { return 1.0 / x; }, {1.0, kInfinity},
                                         SingularEnd::Upper, 1e-12);
    EXPECT_TRUE(div.divergent);
}

TEST(RegressionSlope, RecoversExactLine) {
    EXPECT_NEAR(regression_slope({0, 1, 2, 3}, {1, 3.5, 6, 8.5}), 2.5, 1e-14);
    EXPECT_NEAR(regression_slope({1, 2, 4}, {2, 2, 2}), 0.0, 1e-14);
}
