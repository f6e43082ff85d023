#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "asymlab/defaults.hpp"
#include "asymlab/error.hpp"
#include "asymlab/operator_family.hpp"

using namespace asymlab;

namespace {

// Central difference, used as an independent check of analytic derivatives.
double numeric_derivative(const ScalarFn& f, double s) {
    const double h = 1e-5 * s;
    return (f(s + h) - f(s - h)) / (2.0 * h);
}

StructuralConstants saturating_constants(double K, double m) {
    return {K, 1.0, 1.0, 1.0, 0.25 * K * (1.0 - std::exp2(-m))};
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no exception thrown";
    return ErrorCode::InvalidParams;
}

}  // namespace

TEST(OperatorFamily, PLaplacianFluxAndDerivative) {
    for (double p : {1.5, 2.0, 3.0, 5.0}) {
        const OperatorSpec op = make_p_laplacian(p);
        EXPECT_EQ(op.kind, OperatorKind::PLaplacian);
        EXPECT_FALSE(op.bounded());
        for (double s : {1e-3, 0.3, 1.0, 7.5, 40.0}) {
            EXPECT_NEAR(op.a(s), std::pow(s, p - 1.0), 1e-14 * std::pow(s, p - 1.0));
            EXPECT_NEAR(op.a_prime(s), numeric_derivative(op.a, s), 1e-6 * std::max(1.0, op.a_prime(s)));
        }
        EXPECT_EQ(op.a(0.0), 0.0);
    }
}

TEST(OperatorFamily, PLaplacianRejectsExponentAtMostOne) {
    EXPECT_EQ(code_of([] { make_p_laplacian(1.0); }), ErrorCode::InvalidParams);
    EXPECT_EQ(code_of([] { make_p_laplacian(0.5); }), ErrorCode::InvalidParams);
    EXPECT_EQ(code_of([] { make_p_laplacian(std::nan("")); }), ErrorCode::InvalidParams);
}

TEST(OperatorFamily, MinimalGraphGapIsCancellationFree) {
    const OperatorSpec op = make_minimal_graph();
    ASSERT_TRUE(op.bounded());
    EXPECT_DOUBLE_EQ(op.sup(), 1.0);
    for (double s : {1e-4, 0.5, 3.0, 1e3, 1e6, 1e9}) {
        const long double ls = s;
        const long double exact = 1.0L / (std::sqrt(1.0L + ls * ls) * (std::sqrt(1.0L + ls * ls) + ls));
        EXPECT_NEAR(op.gap(s), static_cast<double>(exact), 1e-14 * static_cast<double>(exact)) << "s=" << s;
        EXPECT_NEAR(op.a_prime(s), numeric_derivative(op.a, s), 1e-6);
    }
}

TEST(OperatorFamily, InversionRoundTrips) {
    const OperatorSpec mg = make_minimal_graph();
    const OperatorSpec p3 = make_p_laplacian(3.0);
    for (double s : {1e-6, 1e-2, 0.7, 4.0, 150.0}) {
        EXPECT_NEAR(invert_a(p3, p3.a(s), 1e-14), s, 1e-11 * std::max(1.0, s));
        if (mg.a(s) < defaults::invert_cap) EXPECT_NEAR(invert_a(mg, mg.a(s), 1e-14), s, 1e-9 * std::max(1.0, s * s));
    }
    // Close to the supremum only the gap form is well conditioned.
    for (double s : {1e4, 1e7, 1e10}) EXPECT_NEAR(invert_a_gap(mg, mg.gap(s), 1e-14), s, 1e-8 * s);
    EXPECT_EQ(code_of([&] { invert_a(mg, 0.9999995, 1e-13); }), ErrorCode::OutOfRange);
    EXPECT_EQ(code_of([&] { invert_a(mg, 1.5, 1e-13); }), ErrorCode::OutOfRange);
}

TEST(OperatorFamily, InverseFluxPicksConditionedRoute) {
    const OperatorSpec mg = make_minimal_graph();
    const double s = 1e8;
    EXPECT_NEAR(inverse_flux(mg, mg.a(s), mg.gap(s)), s, 1e-6 * s);
    EXPECT_NEAR(inverse_flux(mg, mg.a(0.25), kInfinity), 0.25, 1e-12);
}

TEST(OperatorFamily, BuiltinsSatisfyStructure) {
    EXPECT_TRUE(validate_structure(make_minimal_graph(), 64).passed());
    for (double p : {1.2, 2.0, 4.0}) EXPECT_TRUE(validate_structure(make_p_laplacian(p), 64).passed()) << p;
    for (const auto& f : formula_names()) {
        const OperatorSpec op = make_formula_operator(f, {2.0, 3.0}, saturating_constants(2.0, 3.0));
        EXPECT_TRUE(validate_structure(op, 64).passed()) << f;
    }
}

TEST(OperatorFamily, WrongDeclaredConstantsAreRejected) {
    // A(s) = s^2 is not bounded by C(s + 1) for any C.
    CustomOperator def;
    def.name = "quadratic";
    def.a = [](double s) { return s * s; };
    def.a_prime = [](double s) { return 2.0 * s; };
    def.constants = {1.0, 2.0, 2.0, 1.0, 0.5};
    try {
        make_custom(def);
        FAIL() << "accepted wrong constants";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::StructureViolation);
        EXPECT_NE(std::string(e.what()).find("growth_upper"), std::string::npos);
        EXPECT_EQ(std::string(e.what()).find("monotone"), std::string::npos);
    }
    def.constants = {1.0, 3.0, 2.0, 1.0, 0.5};
    EXPECT_TRUE(validate_structure(make_custom(def), 64).passed());
}

TEST(OperatorFamily, NonMonotoneFluxIsRejected) {
    CustomOperator def;
    def.a = [](double s) { return s * std::exp(-s); };
    def.a_prime = [](double s) { return (1.0 - s) * std::exp(-s); };
    def.constants = {1.0, 1.0, 1.0, 0.5, 0.5};
    def.k0 = std::exp(-1.0);
    try {
        make_custom(def);
        FAIL() << "accepted a non-monotone flux";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::StructureViolation);
        EXPECT_NE(std::string(e.what()).find("monotone"), std::string::npos);
    }
}

TEST(OperatorFamily, ScalingMultipliesFlux) {
    const OperatorSpec mg = make_minimal_graph();
    const OperatorSpec s3 = scaled(mg, 3.0);
    EXPECT_DOUBLE_EQ(s3.sup(), 3.0);
    for (double s : {0.1, 1.0, 10.0, 1e6}) {
        EXPECT_NEAR(s3.a(s), 3.0 * mg.a(s), 1e-15);
        EXPECT_NEAR(s3.gap(s), 3.0 * mg.gap(s), 1e-15 * 3.0);
    }
    EXPECT_TRUE(validate_structure(s3, 64).passed());
    EXPECT_EQ(code_of([&] { scaled(mg, -1.0); }), ErrorCode::InvalidParams);
}

TEST(OperatorFamily, FormulaSupremaAreEstimated) {
    for (const auto& f : formula_names()) {
        const OperatorSpec op = make_formula_operator(f, {2.5, 2.0}, saturating_constants(2.5, 2.0));
        EXPECT_NEAR(op.sup(), 2.5, 1e-12) << f;
        EXPECT_NEAR(estimate_sup(op), 2.5, 1e-12) << f;
    }
    EXPECT_EQ(code_of([] { make_formula_operator("no_such_formula", {}, {}); }), ErrorCode::InvalidParams);
}

TEST(Classification, MinimalGraphIsRemovable) {
    const ClassificationResult r = classify(make_minimal_graph(), 1e-10);
    EXPECT_EQ(r.cls, OperatorClass::RemovableType);
    EXPECT_DOUBLE_EQ(r.k0, 1.0);
    // A⁻¹(t) = t / √(1 - t²) ~ (1 - t)^{-1/2}; the integrand ~ (1 - t)^{-1}.
    EXPECT_GE(r.divergence_exponent, 0.9);
    EXPECT_LE(r.divergence_exponent, 1.1);
    // Partial integrals grow without bound (logarithmically).
    ASSERT_GE(r.partial_integrals.size(), 4u);
    EXPECT_GT(r.partial_integrals.back().second, r.partial_integrals[r.partial_integrals.size() - 4].second + 0.5);
}

TEST(Classification, PLaplaciansAreSingular) {
    for (double p : {1.5, 2.0, 3.0, 5.0}) {
        const ClassificationResult r = classify(make_p_laplacian(p), 1e-10);
        EXPECT_EQ(r.cls, OperatorClass::SingularType) << p;
        EXPECT_EQ(r.k0, kInfinity);
    }
}

TEST(Classification, CustomFormulasFollowTheirInverseGrowth) {
    // saturating_power: A⁻¹(t) = (1 - t/K)^{-1/m} - 1, integrand exponent 1/m + 1/2.
    const OperatorSpec sp1 = make_formula_operator("saturating_power", {1.0, 1.0}, saturating_constants(1.0, 1.0));
    const OperatorSpec sp4 = make_formula_operator("saturating_power", {1.0, 4.0}, saturating_constants(1.0, 4.0));
    // rational: A⁻¹(t) = t / (K - t), exponent 3/2.
    const OperatorSpec rat = make_formula_operator("rational", {1.0, 1.0}, saturating_constants(1.0, 1.0));
    const ClassificationResult r1 = classify(sp1, 1e-10);
    const ClassificationResult r4 = classify(sp4, 1e-10);
    const ClassificationResult rr = classify(rat, 1e-10);
    EXPECT_EQ(r1.cls, OperatorClass::RemovableType);
    EXPECT_NEAR(r1.divergence_exponent, 1.5, 0.1);
    EXPECT_EQ(r4.cls, OperatorClass::SingularType);
    EXPECT_EQ(rr.cls, OperatorClass::RemovableType);
    EXPECT_NEAR(rr.divergence_exponent, 1.5, 0.1);
}

TEST(Classification, AgreesUnderScaling) {
    EXPECT_EQ(classify(scaled(make_minimal_graph(), 4.0), 1e-10).cls, OperatorClass::RemovableType);
    EXPECT_EQ(classify(scaled(make_p_laplacian(2.0), 0.25), 1e-10).cls, OperatorClass::SingularType);
}
