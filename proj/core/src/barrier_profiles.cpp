#include "asymlab/barrier_profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "asymlab/error.hpp"
#include "asymlab/quadrature.hpp"

namespace asymlab {
namespace {

// log cosh x without overflow and without losing digits near 0.
double log_cosh(double x) {
    x = std::abs(x);
    if (x < 1.0) {
        const double sh = std::sinh(0.5 * x);
        return std::log1p(2.0 * sh * sh);
    }
    return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
}

double log_sinh(double x) {
    if (x < 1.0) return std::log(std::sinh(x));
    return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2;
}

void check_common(const OperatorSpec& spec, int n, double quad_tol) {
    require(static_cast<bool>(spec.a) && static_cast<bool>(spec.a_prime), ErrorCode::InvalidParams,
            "operator has no flux function");
    require(n >= 2, ErrorCode::InvalidParams, "dimension must be at least 2");
    require(quad_tol > 0.0 && std::isfinite(quad_tol), ErrorCode::InvalidParams, "quad_tol must be positive");
}

// Largest α with (sinh(bα)/sinh(b))^{n-1} at most invert_cap·k0, so the
// integrand stays finite at s = 1.
double alpha_cap(const OperatorSpec& spec, double b, int n) {
    if (!spec.bounded()) return 1.0;
    const double ratio = std::pow(defaults::invert_cap * *spec.k0, 1.0 / (n - 1));
    if (ratio >= 1.0) return 1.0;
    return std::min(1.0, std::asinh(ratio * std::sinh(b)) / b);
}

struct AnnulusIntegrand {
    const OperatorSpec& spec;
    double alpha, b;
    int n;

    // (n-1) log(sinh(bα) / sinh(bs)). Near s = α the ratio minus one comes
    // from the sinh difference formula, which keeps the flux gap accurate when
    // α sits just below the cap.
    double log_flux(double s) const {
        if (b * std::abs(s - alpha) < 1.0 && b * s < 20.0) {
            const double q = 2.0 * std::cosh(0.5 * b * (alpha + s)) * std::sinh(0.5 * b * (alpha - s)) / std::sinh(b * s);
            return (n - 1) * std::log1p(q);
        }
        return (n - 1) * (log_sinh(b * alpha) - log_sinh(b * s));
    }
    double flux(double s) const { return std::exp(log_flux(s)); }
    double du(double s) const {
        const double lf = log_flux(s);
        const double f = std::exp(lf);
        if (f == 0.0) return 0.0;
        return inverse_flux(spec, f, spec.bounded() ? (*spec.k0 - 1.0) - std::expm1(lf) : kInfinity);
    }
    double d2u(double s) const {
        const double f = flux(s);
        if (f == 0.0) return 0.0;
        const double g = du(s);
        return -(n - 1) * b / std::tanh(b * s) * f / spec.a_prime(g);
    }
};

}  // namespace

Profile scherk_profile(const OperatorSpec& spec, double delta, double c, int n, double quad_tol,
                       const ScherkOptions& options) {
    check_common(spec, n, quad_tol);
    require(std::isfinite(delta), ErrorCode::InvalidParams, "δ must be finite");
    require(c > 0.0 && std::isfinite(c), ErrorCode::InvalidParams, "curvature magnitude must be positive");
    if (!spec.bounded()) fail(ErrorCode::NotRemovableType, "Scherk profile needs a finite sup A; " + spec.name + " is unbounded");
    require(options.d_min > 0.0 && options.nodes >= 8, ErrorCode::InvalidParams, "bad Scherk grid options");

    const double k0 = *spec.k0;
    const double sc = std::sqrt(c);
    const auto& cons = spec.constants;
    const double m = n - 1;

    // Flux magnitude k0·sech^{n-1}(√c t) and its distance to k0.
    auto log_ratio = [&](double t) { return -m * log_cosh(sc * t); };
    auto flux = [&](double t) { return k0 * std::exp(log_ratio(t)); };
    auto gap = [&](double t) { return -k0 * std::expm1(log_ratio(t)); };
    auto phi = [&](double t) {
        const double f = flux(t);
        if (f == 0.0) return 0.0;
        return inverse_flux(spec, f, gap(t));
    };

    // Certified truncation: ∫_T^∞ (2^{n-1} k0 e^{-(n-1)√c t} / D̄)^{1/q} dt <= quad_tol / 4,
    // valid once the flux has dropped below A(δ0).
    const double rate = m * sc / cons.lower_q;
    const double scale = std::pow(std::pow(2.0, m) * k0 / cons.lower_dbar, 1.0 / cons.lower_q) / rate;
    double t_cut = std::log(scale / (0.25 * quad_tol)) / rate;
    const double a_delta0 = spec.a(cons.lower_delta0);
    if (a_delta0 < k0) t_cut = std::max(t_cut, std::acosh(std::pow(k0 / a_delta0, 1.0 / m)) / sc);
    t_cut = std::max(t_cut, 2.0 * options.d_min);

    ProfileSource src;
    src.du = [&](double t) { return -phi(t); };
    src.d2u = [&](double t) {
        const double f = flux(t);
        if (f == 0.0) return 0.0;
        return m * sc * std::tanh(sc * t) * f / spec.a_prime(phi(t));
    };
    src.nodes = graded_nodes(options.d_min, t_cut, options.nodes, t_cut / options.d_min, true);
    src.anchor_at_lo = false;
    src.anchor_value = delta;
    src.quad_tol = quad_tol;
    src.domain = {options.d_min, kInfinity};
    src.lo = {EndpointKind::BlowUp, 0.0};
    src.hi = {EndpointKind::FiniteLimit, delta};
    Profile profile = build_profile(src);

    try {
        if (classify(spec, quad_tol).cls != OperatorClass::RemovableType)
            profile.add_warning("operator classifies as singular-type; g(d) stays bounded as d -> 0");
    } catch (const Error& e) {
        profile.add_warning(std::string("classification inconclusive: ") + e.what());
    }
    return profile;
}

double annulus_value(const OperatorSpec& spec, double alpha, double b, int n, double r, double quad_tol) {
    check_common(spec, n, quad_tol);
    require(r >= 1.0, ErrorCode::InvalidParams, "annulus radius must be at least 1");
    if (r == 1.0) return 0.0;
    const AnnulusIntegrand integrand{spec, alpha, b, n};
    return gauss_kronrod([&](double s) { return integrand.du(s); }, 1.0, r, 0.25 * quad_tol, 1e-15).value;
}

AnnulusBarrier annulus_profile(const OperatorSpec& spec, double delta, double b, int n, double rho, double K,
                               double quad_tol, const AnnulusOptions& options) {
    check_common(spec, n, quad_tol);
    require(std::isfinite(delta) && std::isfinite(K), ErrorCode::InvalidParams, "δ and K must be finite");
    require(K > delta, ErrorCode::InvalidParams, "annulus barrier needs K > δ");
    require(rho > 0.0 && std::isfinite(rho), ErrorCode::NonpositiveRadius, "ρ must be positive");
    require(b > 0.0 && std::isfinite(b), ErrorCode::InvalidParams, "b must be positive");
    require(options.nodes >= 8 && options.safety > 0.0 && options.safety < 1.0, ErrorCode::InvalidParams,
            "bad annulus options");

    std::vector<std::string> notes;
    if (n > 2 && b != 1.0) {
        notes.push_back("b forced to 1 for n > 2");
        b = 1.0;
    }
    const double r_outer = 2.0 * rho + 1.0;
    const double ceiling = delta + options.safety * (K - delta) / 2.0;
    const double a_max = alpha_cap(spec, b, n);
    auto h0_of = [&](double alpha) { return delta + annulus_value(spec, alpha, b, n, r_outer, quad_tol); };

    double alpha;
    if (options.alpha) {
        require(*options.alpha > 0.0 && *options.alpha <= 1.0, ErrorCode::InvalidParams, "α must lie in (0, 1]");
        alpha = std::min(*options.alpha, a_max);
        if (alpha < *options.alpha) notes.push_back("requested α capped so the flux stays below sup A");
    } else if (h0_of(a_max) <= ceiling) {
        alpha = a_max;
    } else {
        double lo = defaults::alpha_min, hi = a_max;
        if (!(h0_of(lo) <= ceiling)) fail(ErrorCode::NoAlpha, "even α = " + std::to_string(lo) + " overshoots δ + safety·(K - δ)/2");
        for (int iter = 0; iter < 200 && hi / lo - 1.0 > 1e-12; ++iter) {
            const double mid = std::sqrt(lo * hi);
            (h0_of(mid) <= ceiling ? lo : hi) = mid;
        }
        alpha = lo;
    }

    const AnnulusIntegrand integrand{spec, alpha, b, n};
    const int half = std::max(4, options.nodes / 2);
    std::vector<double> nodes = graded_nodes(1.0, rho + 1.0, half + 1, 20.0, true);
    const std::vector<double> outer = uniform_nodes(rho + 1.0, r_outer, half);
    nodes.insert(nodes.end(), outer.begin() + 1, outer.end());

    ProfileSource src;
    src.du = [&](double s) { return integrand.du(s); };
    src.d2u = [&](double s) { return integrand.d2u(s); };
    src.nodes = std::move(nodes);
    src.anchor_at_lo = true;
    src.anchor_value = delta;
    src.quad_tol = quad_tol;
    src.domain = {1.0, r_outer};
    src.lo = {EndpointKind::FiniteLimit, delta};
    Profile profile = build_profile(src);
    const double h0 = profile.values().back();
    // Re-anchor the upper endpoint now that h0 is known.
    Profile stored(profile.grid(), profile.values(), profile.slopes(), profile.curvatures(), src.domain, src.lo,
                   {EndpointKind::FiniteLimit, h0}, quad_tol);
    for (const auto& w : profile.warnings()) stored.add_warning(w);
    for (auto& w : notes) stored.add_warning(std::move(w));

    AnnulusBarrierSpec out{alpha, h0, stored.value(rho + 1.0), delta, rho, K, b, n};
    if (!options.alpha) {
        require(out.chain_holds(), ErrorCode::NoAlpha,
                "selected α does not separate δ < h1 < h0 < K/2 + δ/2 in floating point");
    } else if (!out.chain_holds()) {
        stored.add_warning("fixed α violates δ < h1 < h0 < K/2 + δ/2");
    }
    return {std::move(stored), out};
}

Profile singular_profile(const OperatorSpec& spec, int n, std::pair<double, double> d_range, double quad_tol,
                         double c, int nodes) {
    check_common(spec, n, quad_tol);
    if (spec.bounded()) fail(ErrorCode::BoundedOperator, "singular profile needs an unbounded A; sup A of " + spec.name + " is finite");
    require(d_range.first < d_range.second && std::isfinite(d_range.first) && std::isfinite(d_range.second),
            ErrorCode::InvalidParams, "d_range must be a finite increasing pair");
    require(c > 0.0 && std::isfinite(c), ErrorCode::InvalidParams, "curvature magnitude must be positive");
    require(nodes >= 8, ErrorCode::InvalidParams, "singular profile needs at least 8 nodes");

    const double k = (n - 1) * std::sqrt(c);
    const auto& cons = spec.constants;
    auto phi = [&](double s) {
        const double f = std::exp(k * s);
        return f == 0.0 ? 0.0 : invert_a(spec, f, defaults::invert_tol);
    };

    // ∫_{-∞}^T (e^{ks}/D̄)^{1/q} ds = (q/k) (e^{kT}/D̄)^{1/q} <= quad_tol / 4, with e^{kT} <= A(δ0).
    const double q = cons.lower_q;
    double t_cut = (q * std::log(0.25 * quad_tol * k / q) + std::log(cons.lower_dbar)) / k;
    t_cut = std::min(t_cut, std::log(spec.a(cons.lower_delta0)) / k);
    t_cut = std::min(t_cut, d_range.first - 1.0);
    const double start = gauss_kronrod(phi, t_cut, d_range.first, 0.25 * quad_tol, 1e-15).value;

    ProfileSource src;
    src.du = phi;
    src.d2u = [&](double s) {
        const double f = std::exp(k * s);
        if (f == 0.0) return 0.0;
        return k * f / spec.a_prime(phi(s));
    };
    src.nodes = uniform_nodes(d_range.first, d_range.second, nodes);
    src.anchor_at_lo = true;
    src.anchor_value = start;
    src.quad_tol = quad_tol;
    src.domain = {-kInfinity, d_range.second};
    src.lo = {EndpointKind::DecayToZero, 0.0};
    src.hi = {EndpointKind::BlowUp, 0.0};
    return build_profile(src);
}

double ode_residual(const Profile& profile, const OperatorSpec& spec, const std::function<double(double)>& coefficient) {
    if (profile.direction() == Monotonicity::Constant) return 0.0;
    require(profile.size() >= 5, ErrorCode::TooFewNodes, "ode_residual needs at least 5 nodes");
    const auto& x = profile.grid();
    auto a_odd = [&](double s) { return s >= 0.0 ? spec.a(s) : -spec.a(-s); };
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double h = 0.25 * std::min(x[i] - x[i - 1], x[i + 1] - x[i]);
        const double um2 = profile.value(x[i] - 2 * h), um1 = profile.value(x[i] - h);
        const double u0 = profile.value(x[i]);
        const double up1 = profile.value(x[i] + h), up2 = profile.value(x[i] + 2 * h);
        const double d1 = (um2 - 8 * um1 + 8 * up1 - up2) / (12 * h);
        const double d2 = (-um2 + 16 * um1 - 30 * u0 + 16 * up1 - up2) / (12 * h * h);
        if (d1 == 0.0 && d2 == 0.0) continue;
        const double r = spec.a_prime(std::abs(d1)) * d2 + a_odd(d1) * coefficient(x[i]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace asymlab
