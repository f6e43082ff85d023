#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "asymlab/error.hpp"
#include "asymlab/hyperbolic_geometry.hpp"

using namespace asymlab;

namespace {

// Closed-form ball-model distance, independent of the library's formula.
double reference_distance(const Vec& x, const Vec& y, double c) {
    const double num = 2.0 * (x - y).squaredNorm();
    const double den = (1.0 - x.squaredNorm()) * (1.0 - y.squaredNorm());
    return std::acosh(1.0 + num / den) / std::sqrt(c);
}

Vec random_point(std::mt19937_64& rng, int n, double max_norm) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v.normalized() * (max_norm * std::pow(u(rng), 1.0 / n));
}

IdealPoint random_ideal(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return IdealPoint(v.normalized());
}

Vec unit(int n, int k) { return Vec::Unit(n, k); }

}  // namespace

TEST(Geometry, DistanceMatchesClosedForm) {
    std::mt19937_64 rng(11);
    for (int n : {2, 3, 5})
        for (double c : {0.25, 1.0, 4.0}) {
            const Model m{n, c};
            for (int k = 0; k < 50; ++k) {
                const Vec x = random_point(rng, n, 0.95), y = random_point(rng, n, 0.95);
                EXPECT_NEAR(hyp_distance(Point(x, m), Point(y, m)), reference_distance(x, y, c), 1e-10);
            }
        }
}

TEST(Geometry, PointAlongHasRequestedDistance) {
    const Model m{3, 2.0};
    const IdealPoint xi(unit(3, 1));
    for (double t : {-5.0, -0.3, 0.0, 1.0, 8.0}) {
        const Point p = point_along(xi, t, m);
        EXPECT_NEAR(hyp_distance(Point::origin(m), p), std::abs(t), 1e-11);
        if (t != 0.0) EXPECT_GT(t * p.x()[1], 0.0);
    }
}

TEST(Geometry, RejectsInvalidInputs) {
    const Model m{2, 1.0};
    Vec out(2);
    out << 0.8, 0.7;
    EXPECT_THROW(Point(out, m), Error);
    EXPECT_THROW(Point(Vec::Zero(3), m), Error);
    EXPECT_THROW(IdealPoint(Vec::Constant(2, 0.5)), Error);
    EXPECT_THROW((Point(Vec::Zero(2), Model{2, -1.0})), Error);
}

TEST(Geometry, BusemannMatchesLimitDefinition) {
    // b(x) = lim_t (t - d(x, γ(t))) for the ray γ from the origin to ξ.
    std::mt19937_64 rng(5);
    for (int n : {2, 3}) {
        const Model m{n, 1.0};
        const IdealPoint xi = random_ideal(rng, n);
        const Horosphere h(xi, Point::origin(m));
        for (int k = 0; k < 20; ++k) {
            const Point x(random_point(rng, n, 0.8), m);
            const double t = 18.0;
            const double limit = t - hyp_distance(x, point_along(xi, t, m));
            EXPECT_NEAR(busemann(x, h), limit, 1e-6);
        }
    }
}

TEST(Geometry, BusemannIsZeroOnHorosphereAndSignedByHoroball) {
    const Model m{2, 1.0};
    const IdealPoint xi(unit(2, 0));
    const Point through = point_along(xi, 2.0, m);
    const Horosphere h(xi, through);
    EXPECT_NEAR(busemann(through, h), 0.0, 1e-12);
    EXPECT_NEAR(busemann(point_along(xi, 3.5, m), h), 1.5, 1e-10);
    EXPECT_NEAR(busemann(Point::origin(m), h), -2.0, 1e-10);
}

TEST(Geometry, DistanceToDiameterGeodesic) {
    const Model m{2, 1.0};
    const Geodesic g(IdealPoint(-unit(2, 0)), IdealPoint(unit(2, 0)));
    for (double d : {0.1, 1.0, 3.0}) {
        const Point p = point_along(IdealPoint(unit(2, 1)), d, m);
        EXPECT_NEAR(dist_to_geodesic(p, g), d, 1e-11);
    }
    EXPECT_NEAR(dist_to_geodesic(geodesic_point(g, 2.0, m), g), 0.0, 1e-12);
}

TEST(Geometry, SignedDistanceToHyperplane) {
    const Model m{3, 1.0};
    const Hyperplane hp{IdealPoint(unit(3, 2)), 1.0};
    EXPECT_NEAR(signed_distance(point_along(IdealPoint(unit(3, 2)), 3.0, m), hp), 2.0, 1e-10);
    EXPECT_NEAR(signed_distance(Point::origin(m), hp), -1.0, 1e-12);
}

TEST(Geometry, HyperplaneOfGeodesicMatchesDistance) {
    std::mt19937_64 rng(9);
    const Model m{2, 1.0};
    for (int k = 0; k < 20; ++k) {
        const Geodesic g(random_ideal(rng, 2), random_ideal(rng, 2));
        const Hyperplane hp = hyperplane_of(g, m);
        const Point x(random_point(rng, 2, 0.9), m);
        EXPECT_NEAR(std::abs(signed_distance(x, hp)), dist_to_geodesic(x, g), 1e-9);
    }
}

TEST(Geometry, GeodesicFrameMapsPositiveSide) {
    std::mt19937_64 rng(4);
    const Model m{2, 1.0};
    for (int k = 0; k < 20; ++k) {
        const Geodesic g(random_ideal(rng, 2), random_ideal(rng, 2));
        const Isometry f = geodesic_frame(g, m);
        const Point up = apply_isometry(f, point_along(IdealPoint(unit(2, 1)), 0.7, m));
        EXPECT_NEAR(signed_distance(up, hyperplane_of(g, m)), 0.7, 1e-9);
        const Point on = apply_isometry(f, point_along(IdealPoint(unit(2, 0)), 1.3, m));
        EXPECT_NEAR(dist_to_geodesic(on, g), 0.0, 1e-9);
    }
    // The diametral case.
    const Geodesic d(IdealPoint(unit(2, 1)), IdealPoint(-unit(2, 1)));
    const Point up = apply_isometry(geodesic_frame(d, m), point_along(IdealPoint(unit(2, 1)), 0.7, m));
    EXPECT_NEAR(signed_distance(up, hyperplane_of(d, m)), 0.7, 1e-10);
}

TEST(Geometry, IsometryInverseAndComposition) {
    std::mt19937_64 rng(3);
    const Model m{3, 1.0};
    for (int k = 0; k < 50; ++k) {
        const Isometry a = random_isometry(rng, 3), b = random_isometry(rng, 3);
        const Vec x = random_point(rng, 3, 0.9);
        EXPECT_LT((a.inverse().apply(a.apply(x)) - x).norm(), 1e-12);
        EXPECT_LT((a.compose(b).apply(x) - a.apply(b.apply(x))).norm(), 1e-12);
    }
    (void)m;
}

TEST(Geometry, IsometryInvarianceOfDistanceAndBusemann) {
    std::mt19937_64 rng(2024);
    double worst_d = 0.0, worst_b = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const int n = 2 + k % 3;
        const Model m{n, k % 2 == 0 ? 1.0 : 2.5};
        const Isometry t = random_isometry(rng, n);
        const Point x(random_point(rng, n, 0.9), m), y(random_point(rng, n, 0.9), m);
        const Horosphere h(random_ideal(rng, n), Point(random_point(rng, n, 0.5), m));
        worst_d = std::max(worst_d, std::abs(hyp_distance(apply_isometry(t, x), apply_isometry(t, y)) - hyp_distance(x, y)));
        worst_b = std::max(worst_b, std::abs(busemann(apply_isometry(t, x), apply_isometry(t, h)) - busemann(x, h)));
    }
    EXPECT_LE(worst_d, 1e-9);
    EXPECT_LE(worst_b, 1e-9);
}

TEST(Geometry, IdealPointFixingMaps) {
    const Model m{2, 1.0};
    const IdealPoint xi(unit(2, 0));
    const Horosphere h(xi, Point::origin(m));
    const Isometry shift = mobius_fix_ideal(xi, 1.5, m);
    EXPECT_LT((apply_isometry(shift, xi).xi() - xi.xi()).norm(), 1e-12);
    EXPECT_NEAR(busemann(apply_isometry(shift, Point::origin(m)), h), 1.5, 1e-10);
    Vec w(2);
    w << 0.0, 0.4;
    const Isometry par = parabolic_fix_ideal(xi, w);
    const Point moved = apply_isometry(par, Point::origin(m));
    EXPECT_NEAR(busemann(moved, h), 0.0, 1e-10);
    EXPECT_GT(hyp_distance(moved, Point::origin(m)), 0.1);
}

TEST(Geometry, LaplacianOfDistanceFunctions) {
    for (int n : {2, 3, 4})
        for (double c : {1.0, 3.0}) {
            const double sc = std::sqrt(c);
            EXPECT_NEAR(laplacian_distance(0.0, c, n, DistanceMode::Horosphere), -(n - 1) * sc, 1e-15);
            EXPECT_NEAR(laplacian_distance(1.2, c, n, DistanceMode::Sphere), (n - 1) * sc / std::tanh(sc * 1.2), 1e-13);
        }
}

TEST(Geometry, FiniteDifferenceLaplacianOfBusemannConverges) {
    for (int n : {2, 3})
        for (double c : {1.0, 2.0}) {
            const Model m{n, c};
            const Horosphere h(IdealPoint(unit(n, 0)), Point::origin(m));
            Vec x = Vec::Zero(n);
            x[0] = 0.3;
            x[n - 1] += 0.2;
            const auto f = [&](const Vec& v) { return busemann(Point(v, m), h); };
            const double exact = -(n - 1) * std::sqrt(c);
            double e1 = std::abs(fd_metric_laplacian(f, x, 1e-2, m) - exact);
            double e2 = std::abs(fd_metric_laplacian(f, x, 5e-3, m) - exact);
            EXPECT_LT(e2, 1e-3);
            EXPECT_GE(std::log2(e1 / e2), 1.9) << "n=" << n << " c=" << c;
        }
}

TEST(Geometry, GradientNormOfDistanceIsOne) {
    const Model m{2, 1.0};
    const Point o = Point::origin(m);
    Vec x(2);
    x << 0.3, -0.4;
    const auto f = [&](const Vec& v) { return hyp_distance(Point(v, m), o); };
    EXPECT_NEAR(fd_metric_gradient_norm(f, x, 1e-4, m), 1.0, 1e-6);
    EXPECT_NEAR(conformal_factor(x, m), 2.0 / (1.0 - 0.25), 1e-15);
}
