#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "asymlab/defaults.hpp"
#include "asymlab/operator_family.hpp"
#include "asymlab/profile.hpp"

namespace asymlab {

struct ScherkOptions {
    double d_min = 1e-4;  // first node; the profile blows up at 0
    int nodes = defaults::profile_nodes;
};

/// g(d) = δ + ∫_d^∞ A⁻¹(K0 / cosh^{n-1}(√c t)) dt for a bounded operator.
///
/// The upper limit is cut at the first T past which the lower structural
/// bound A⁻¹(t) <= (t/D̄)^{1/q} certifies a remaining tail below quad_tol/4;
/// beyond T the profile is flat at δ. Throws NotRemovableType when sup A is
/// infinite and attaches a warning when the operator classifies as singular.
Profile scherk_profile(const OperatorSpec& spec, double delta, double c, int n, double quad_tol,
                       const ScherkOptions& options = {});

struct AnnulusBarrierSpec {
    double alpha = 0.0;
    double h0 = 0.0;  // f(2ρ + 1)
    double h1 = 0.0;  // f(ρ + 1)
    double delta = 0.0;
    double rho = 0.0;
    double K = 0.0;
    double b = 1.0;
    int n = 2;

    /// δ < h1 < h0 < K/2 + δ/2
    bool chain_holds() const { return delta < h1 && h1 < h0 && h0 < 0.5 * K + 0.5 * delta; }
};

struct AnnulusOptions {
    std::optional<double> alpha;  // bypasses the bisection (still capped for bounded operators)
    int nodes = defaults::profile_nodes;
    double safety = defaults::alpha_safety;
};

struct AnnulusBarrier {
    Profile profile;
    AnnulusBarrierSpec spec;
};

/// f(r) = δ + ∫_1^r A⁻¹((sinh(bα) / sinh(bs))^{n-1}) ds on [1, 2ρ+1], with α
/// the largest value in (0, 1] keeping f(2ρ+1) <= δ + safety·(K - δ)/2.
/// For n > 2 the curvature scale b is fixed to 1.
AnnulusBarrier annulus_profile(const OperatorSpec& spec, double delta, double b, int n, double rho, double K,
                               double quad_tol, const AnnulusOptions& options = {});

/// The value f(r) of the annulus profile for a given α, by direct quadrature.
double annulus_value(const OperatorSpec& spec, double alpha, double b, int n, double r, double quad_tol);

/// g0(d) = ∫_{-∞}^d A⁻¹(e^{(n-1)√c s}) ds for an unbounded operator, tabulated
/// on d_range. The lower limit is cut where the structural bound certifies the
/// neglected part below quad_tol/4; below d_range.first the profile decays
/// exponentially to 0.
Profile singular_profile(const OperatorSpec& spec, int n, std::pair<double, double> d_range, double quad_tol,
                         double c = 1.0, int nodes = defaults::profile_nodes);

/// max over interior nodes of |A'(|u'|) u'' + A(u') coefficient(x)| with A
/// extended oddly, using fourth-order central differences of the interpolant.
double ode_residual(const Profile& profile, const OperatorSpec& spec, const std::function<double(double)>& coefficient);

}  // namespace asymlab
