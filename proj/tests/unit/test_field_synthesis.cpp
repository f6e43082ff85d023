#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "asymlab/barrier_profiles.hpp"
#include "asymlab/error.hpp"
#include "asymlab/field_synthesis.hpp"
#include "asymlab/sampling.hpp"

using namespace asymlab;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no exception thrown";
    return ErrorCode::InvalidParams;
}

// u(d) = d on a wide window, so the field is the distance function itself.
Profile identity_profile(double lo, double hi) {
    std::vector<double> x, v, s, k;
    for (int i = 0; i <= 16; ++i) {
        const double t = lo + (hi - lo) * i / 16.0;
        x.push_back(t);
        v.push_back(t);
        s.push_back(1.0);
        k.push_back(0.0);
    }
    return Profile(x, v, s, k, {lo, hi}, {}, {}, 1e-12);
}

Point sample_point(double x0, double x1, const Model& m) {
    Vec v(2);
    v << x0, x1;
    return Point(v, m);
}

}  // namespace

TEST(FieldSynthesis, FieldEvaluatesProfileOfDistance) {
    const Model m{2, 1.0};
    const IdealPoint xi(Vec::Unit(2, 0));
    const Horosphere h(xi, Point::origin(m));
    const ScalarField f(identity_profile(-10.0, 10.0), distance::Horospherical{h}, m, 2.0, 0.5);
    const Point p = point_along(xi, 1.25, m);
    EXPECT_NEAR(f.distance(p.x()), 1.25, 1e-12);
    EXPECT_NEAR(f(p), 2.0 * 1.25 + 0.5, 1e-11);
    EXPECT_NEAR(f.negated()(p), -(2.0 * 1.25 + 0.5), 1e-11);
    EXPECT_EQ(distance_name(f.kind()), distance_name(DistanceKind{distance::Horospherical{h}}));
}

TEST(FieldSynthesis, HarmonicCaseGivesLaplacianOfDistance) {
    // For p = 2, Q(d) = Δd: -(n-1)√c for Busemann, (n-1)√c coth(√c r) for the point distance.
    const OperatorSpec p2 = make_p_laplacian(2.0);
    for (int n : {2, 3}) {
        const Model m{n, 1.5};
        const Horosphere h(IdealPoint(Vec::Unit(n, 0)), Point::origin(m));
        const ScalarField bus(identity_profile(-10.0, 10.0), distance::Horospherical{h}, m);
        Vec x = Vec::Zero(n);
        x[0] = 0.2;
        x[n - 1] = -0.3;
        const Point pt(x, m);
        EXPECT_NEAR(divergence_residual(bus, p2, pt, 1e-3), -(n - 1) * std::sqrt(1.5), 1e-4);
        const ScalarField rad(identity_profile(0.0, 10.0), distance::ToPoint{Point::origin(m)}, m);
        const double r = hyp_distance(pt, Point::origin(m));
        EXPECT_NEAR(divergence_residual(rad, p2, pt, 1e-3),
                    laplacian_distance(r, 1.5, n, DistanceMode::Sphere), 1e-4);
    }
}

TEST(FieldSynthesis, SingularSolutionResidualConvergesAtSecondOrder) {
    for (double p : {1.5, 2.0, 3.0}) {
        const OperatorSpec op = make_p_laplacian(p);
        const Model m{2, 1.0};
        const Horosphere h(IdealPoint(Vec::Unit(2, 0)), Point::origin(m));
        const ScalarField g0(singular_profile(op, 2, {-8.0, 4.0}, 1e-12, 1.0, 2000), distance::Horospherical{h}, m);
        const Point pt = sample_point(0.1, 0.35, m);
        const double r1 = std::abs(divergence_residual(g0, op, pt, 2e-2));
        const double r2 = std::abs(divergence_residual(g0, op, pt, 1e-2));
        const double r3 = std::abs(divergence_residual(g0, op, pt, 5e-3));
        EXPECT_GE(std::log2(r1 / r2), 1.9) << p;
        EXPECT_GE(std::log2(r2 / r3), 1.9) << p;
    }
}

TEST(FieldSynthesis, ResidualRejectsStencilsOutsideTheBall) {
    const OperatorSpec p2 = make_p_laplacian(2.0);
    const Model m{2, 1.0};
    const ScalarField f(identity_profile(0.0, 40.0), distance::ToPoint{Point::origin(m)}, m);
    EXPECT_EQ(code_of([&] { divergence_residual(f, p2, sample_point(0.0, 0.995, m), 1e-2); }),
              ErrorCode::StencilOutOfDomain);
    // The stencil also may not leave the profile's domain.
    const ScalarField narrow(identity_profile(0.5, 3.0), distance::ToPoint{Point::origin(m)}, m);
    EXPECT_EQ(code_of([&] { divergence_residual(narrow, p2, sample_point(0.0, 0.02, m), 1e-2); }),
              ErrorCode::StencilOutOfDomain);
}

TEST(FieldSynthesis, DegenerateGradient) {
    const Model m{2, 1.0};
    const Horosphere h(IdealPoint(Vec::Unit(2, 0)), Point::origin(m));
    const ScalarField tiny(identity_profile(-10.0, 10.0), distance::Horospherical{h}, m, 1e-12);
    const Point pt = sample_point(0.1, 0.1, m);
    // A(s)/s = s^{-1/2} has no finite limit at 0.
    EXPECT_EQ(code_of([&] { divergence_residual(tiny, make_p_laplacian(1.5), pt, 1e-3); }),
              ErrorCode::DegenerateGradient);
    // For p = 3 and the minimal graph the limit is finite.
    EXPECT_NO_THROW(divergence_residual(tiny, make_p_laplacian(3.0), pt, 1e-3));
    EXPECT_NEAR(divergence_residual(tiny, make_minimal_graph(), pt, 1e-3), -1e-12, 1e-15);
    const ScalarField flat(Profile::constant(3.0), distance::Horospherical{h}, m);
    EXPECT_EQ(divergence_residual(flat, make_p_laplacian(1.5), pt, 1e-3), 0.0);
}

TEST(Supersolution, ScherkFieldHasNoViolations) {
    const OperatorSpec mg = make_minimal_graph();
    const Model m{2, 1.0};
    const Geodesic g(IdealPoint(Vec::Unit(2, 1)), IdealPoint(-Vec::Unit(2, 1)));
    const ScalarField f(scherk_profile(mg, 0.0, 1.0, 2, 1e-10), distance::ToHyperplane{hyperplane_of(g, m)}, m);
    const auto samples = sample_tube(g, m, 200, 1.5, 0.1, 2.0, 42);
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        const ResidualReport rep = supersolution_check(f, mg, samples, h, 1e-6);
        EXPECT_EQ(rep.sign_violations, 0) << h;
        EXPECT_EQ(rep.residuals.size(), samples.size());
        EXPECT_GT(rep.allowance_c, 0.0);
    }
}

TEST(Supersolution, StrictScherkSupersolutionInThreeDimensions) {
    // Around a geodesic line of H³ the distance has Δd = tanh d + coth d > 2 tanh d,
    // so the Scherk profile is a strict supersolution and its negation is not.
    const OperatorSpec mg = make_minimal_graph();
    const Model m{3, 1.0};
    const Geodesic line(IdealPoint(-Vec::Unit(3, 0)), IdealPoint(Vec::Unit(3, 0)));
    const ScalarField f(scherk_profile(mg, 0.0, 1.0, 3, 1e-10), distance::ToGeodesic{line}, m);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-0.75, 0.75);
    std::vector<Point> samples;
    while (samples.size() < 100) {
        Vec x(3);
        x << u(rng), u(rng), u(rng);
        if (x.norm() > 0.8) continue;
        const Point p(x, m);
        const double d = dist_to_geodesic(p, line);
        if (d > 0.3 && d < 2.0) samples.push_back(p);
    }
    const ResidualReport sup = supersolution_check(f, mg, samples, 5e-3, 1e-6);
    EXPECT_EQ(sup.sign_violations, 0);
    EXPECT_LT(sup.max_signed, 0.0);
    const ResidualReport neg = supersolution_check(f.negated(), mg, samples, 5e-3, 1e-6);
    EXPECT_GT(neg.sign_violations, 0);
}

TEST(Supersolution, AnnulusFieldSignFollowsCurvatureScale) {
    // Q(f(r)) = A(f') (coth r - b coth(b r)) in H²(-1): zero for b = 1 and
    // negative for b > 1; b < 1 gives a subsolution.
    const OperatorSpec mg = make_minimal_graph();
    const Model m{2, 1.0};
    const auto samples = sample_annulus(Point::origin(m), 200, 1.2, 2.8, 7);
    for (double b : {1.0, 1.5}) {
        const AnnulusBarrier ab = annulus_profile(mg, 0.0, b, 2, 1.0, 2.0, 1e-10);
        const ScalarField f(ab.profile, distance::ToPoint{Point::origin(m)}, m);
        EXPECT_EQ(supersolution_check(f, mg, samples, 5e-3, 1e-6).sign_violations, 0) << b;
    }
    const AnnulusBarrier strict = annulus_profile(mg, 0.0, 1.5, 2, 1.0, 2.0, 1e-10);
    const ScalarField fs(strict.profile, distance::ToPoint{Point::origin(m)}, m);
    EXPECT_GT(supersolution_check(fs.negated(), mg, samples, 5e-3, 1e-6).sign_violations, 0);
    const AnnulusBarrier sub = annulus_profile(mg, 0.0, 0.6, 2, 1.0, 2.0, 1e-10);
    const ScalarField fb(sub.profile, distance::ToPoint{Point::origin(m)}, m);
    EXPECT_GT(supersolution_check(fb, mg, samples, 5e-3, 1e-6).sign_violations, 0);
}

TEST(Supersolution, ReportRecordsSeedAndThreshold) {
    const OperatorSpec p2 = make_p_laplacian(2.0);
    const Model m{2, 1.0};
    const Horosphere h(IdealPoint(Vec::Unit(2, 0)), Point::origin(m));
    const ScalarField g0(singular_profile(p2, 2, {-8.0, 4.0}, 1e-10), distance::Horospherical{h}, m);
    SupersolutionOptions opts;
    opts.seed = 99;
    opts.allowance_factor = 3.0;
    const ResidualReport rep = supersolution_check(g0, p2, sample_horoball(h, 20, -2.0, 1.0, 0.5, 99), 1e-2, 1e-6, opts);
    EXPECT_EQ(rep.seed, 99u);
    EXPECT_DOUBLE_EQ(rep.threshold(), 1e-6 + 3.0 * rep.allowance_c * 1e-4);
    EXPECT_TRUE(rep.passed());
}

TEST(BoundaryTrace, LimitsTowardsIdealPoints) {
    const OperatorSpec p2 = make_p_laplacian(2.0);
    const Model m{2, 1.0};
    const IdealPoint xi(Vec::Unit(2, 0));
    const IdealPoint other(-Vec::Unit(2, 0));
    const Horosphere h(xi, Point::origin(m));
    const ScalarField g0(singular_profile(p2, 2, {-12.0, 8.0}, 1e-10), distance::Horospherical{h}, m);
    const auto to_xi = boundary_trace(g0, xi, radial_approach(xi, m, 8, 1.0, 0.8));
    EXPECT_EQ(classify_trace(to_xi).limit, TraceLimit::ToInfinity);
    const auto away = boundary_trace(g0, other, radial_approach(other, m, 8, 10.0, 1.0));
    EXPECT_EQ(classify_trace(away).limit, TraceLimit::ToZero);
    for (const auto& e : to_xi) EXPECT_GT(e.boundary_distance, 0.0);

    const OperatorSpec mg = make_minimal_graph();
    const Geodesic g(IdealPoint(Vec::Unit(2, 1)), IdealPoint(-Vec::Unit(2, 1)));
    const ScalarField sch(scherk_profile(mg, 0.5, 1.0, 2, 1e-10), distance::ToHyperplane{hyperplane_of(g, m)}, m);
    const Hyperplane hp = hyperplane_of(g, m);
    const auto side = boundary_trace(sch, hp.center, radial_approach(hp.center, m, 8, 6.0, 1.5));
    const TraceVerdict v = classify_trace(side);
    EXPECT_EQ(v.limit, TraceLimit::ToConstant);
    EXPECT_NEAR(v.last_value, 0.5, 1e-6);
}
