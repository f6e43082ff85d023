#include "asymlab/operator_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "asymlab/defaults.hpp"
#include "asymlab/error.hpp"
#include "asymlab/quadrature.hpp"

namespace asymlab {

std::string_view to_string(OperatorKind kind) noexcept {
    switch (kind) {
        case OperatorKind::PLaplacian: return "pLaplacian";
        case OperatorKind::MinimalGraph: return "minimalGraph";
        case OperatorKind::Custom: return "custom";
    }
    return "unknown";
}

std::string_view to_string(OperatorClass c) noexcept {
    return c == OperatorClass::RemovableType ? "RemovableType" : "SingularType";
}

double OperatorSpec::gap(double s) const {
    if (a_gap) return a_gap(s);
    return sup() - a(s);
}

namespace {

void enforce_valid(const OperatorSpec& spec) {
    const auto report = validate_structure(spec, defaults::validation_samples);
    if (report.passed()) return;
    std::ostringstream msg;
    msg << spec.name << " violates:";
    for (const auto& c : report.checks)
        if (!c.passed) msg << ' ' << c.name << " (margin " << c.worst_margin << ")";
    fail(ErrorCode::StructureViolation, msg.str());
}

// Sampled supremum, ignoring any declared k0.
double sampled_sup(const ScalarFn& a) {
    double previous = a(1e11);
    double last = a(1e12);
    require(std::isfinite(last), ErrorCode::Inconclusive, "estimate_sup: A(1e12) is not finite");
    require(last > 0.0, ErrorCode::Inconclusive, "estimate_sup: A is not positive at large s");
    const double growth = (last - previous) / std::abs(last);
    if (growth > 1e-3) return kInfinity;
    if (growth < 1e-6) return (10.0 * last - previous) / 9.0;  // Richardson in h = 1/s
    fail(ErrorCode::Inconclusive,
         "estimate_sup: relative growth " + std::to_string(growth) + " between saturation and blow-up");
}

}  // namespace

OperatorSpec make_p_laplacian(double p) {
    require(std::isfinite(p) && p > 1.0, ErrorCode::InvalidParams, "p must exceed 1");
    OperatorSpec spec;
    spec.kind = OperatorKind::PLaplacian;
    std::ostringstream name;
    name << "pLaplacian(p=" << p << ")";
    spec.name = name.str();
    spec.p = p;
    spec.a = [p](double s) { return std::pow(s, p - 1.0); };
    spec.a_prime = [p](double s) { return (p - 1.0) * std::pow(s, p - 2.0); };
    spec.constants = {1.0, p, p - 1.0, 1.0, 1.0 - defaults::plaplace_lower_eps};
    spec.k0 = kInfinity;
    if (p == 2.0) spec.flux_ratio_at_zero = 1.0;
    else if (p > 2.0) spec.flux_ratio_at_zero = 0.0;
    enforce_valid(spec);
    return spec;
}

OperatorSpec make_minimal_graph() {
    OperatorSpec spec;
    spec.kind = OperatorKind::MinimalGraph;
    spec.name = "minimalGraph";
    spec.a = [](double s) { return s / std::sqrt(1.0 + s * s); };
    spec.a_prime = [](double s) {
        const double w = 1.0 + s * s;
        return 1.0 / (w * std::sqrt(w));
    };
    spec.a_gap = [](double s) {
        const double w = std::sqrt(1.0 + s * s);
        return 1.0 / (w * (w + s));
    };
    spec.constants = {1.0, 2.0, 1.0, 1.0, 1.0 / std::numbers::sqrt2};
    spec.k0 = 1.0;
    spec.flux_ratio_at_zero = 1.0;
    enforce_valid(spec);
    return spec;
}

OperatorSpec make_custom(CustomOperator def) {
    require(static_cast<bool>(def.a) && static_cast<bool>(def.a_prime), ErrorCode::InvalidParams,
            "custom operator needs both a and a_prime");
    const auto& c = def.constants;
    require(c.growth_c > 0.0 && c.growth_p >= 1.0 && c.lower_q > 0.0 && c.lower_delta0 > 0.0 &&
                c.lower_dbar > 0.0,
            ErrorCode::InvalidParams, "custom operator structural constants out of range");
    OperatorSpec spec;
    spec.kind = OperatorKind::Custom;
    spec.name = def.name;
    spec.a = std::move(def.a);
    spec.a_prime = std::move(def.a_prime);
    spec.a_gap = std::move(def.a_gap);
    spec.constants = def.constants;
    spec.flux_ratio_at_zero = def.flux_ratio_at_zero;
    spec.k0 = def.k0 ? *def.k0 : sampled_sup(spec.a);
    if (!spec.bounded()) spec.a_gap = nullptr;
    enforce_valid(spec);
    return spec;
}

std::vector<std::string> formula_names() { return {"rational", "saturating_power", "arctan"}; }

OperatorSpec make_formula_operator(std::string_view formula, FormulaParams params,
                                   StructuralConstants constants, std::optional<double> declared_k0) {
    const double k = params.scale;
    const double m = params.exponent;
    require(std::isfinite(k) && k > 0.0, ErrorCode::InvalidParams, "formula scale K must be positive");
    CustomOperator def;
    def.constants = constants;
    def.k0 = declared_k0;
    if (formula == "rational") {
        def.name = "rational(K=" + std::to_string(k) + ")";
        def.a = [k](double s) { return k * s / (1.0 + s); };
        def.a_prime = [k](double s) { return k / ((1.0 + s) * (1.0 + s)); };
        def.a_gap = [k](double s) { return k / (1.0 + s); };
        def.flux_ratio_at_zero = k;
    } else if (formula == "saturating_power") {
        require(std::isfinite(m) && m > 0.0, ErrorCode::InvalidParams, "saturating_power needs m > 0");
        def.name = "saturating_power(K=" + std::to_string(k) + ",m=" + std::to_string(m) + ")";
        def.a = [k, m](double s) { return -k * std::expm1(-m * std::log1p(s)); };
        def.a_prime = [k, m](double s) { return k * m * std::pow(1.0 + s, -m - 1.0); };
        def.a_gap = [k, m](double s) { return k * std::pow(1.0 + s, -m); };
        def.flux_ratio_at_zero = k * m;
    } else if (formula == "arctan") {
        const double c = 2.0 * k / std::numbers::pi;
        def.name = "arctan(K=" + std::to_string(k) + ")";
        def.a = [c](double s) { return c * std::atan(s); };
        def.a_prime = [c](double s) { return c / (1.0 + s * s); };
        def.a_gap = [c](double s) { return s > 0.0 ? c * std::atan(1.0 / s) : c * std::numbers::pi / 2; };
        def.flux_ratio_at_zero = c;
    } else {
        fail(ErrorCode::InvalidParams, "unknown operator formula '" + std::string(formula) + "'");
    }
    if (declared_k0) {
        const double expected = k;
        require(std::abs(*declared_k0 - expected) <= 1e-12 * expected, ErrorCode::InvalidParams,
                "declared k0 differs from sup A; only K0 = sup A is supported");
    }
    return make_custom(std::move(def));
}

OperatorSpec make_operator(OperatorKind kind, const OperatorParams& params) {
    switch (kind) {
        case OperatorKind::PLaplacian: return make_p_laplacian(params.p);
        case OperatorKind::MinimalGraph: return make_minimal_graph();
        case OperatorKind::Custom:
            require(params.custom.has_value(), ErrorCode::InvalidParams,
                    "custom operator requires callables and constants");
            return make_custom(*params.custom);
    }
    fail(ErrorCode::InvalidParams, "unknown operator kind");
}

OperatorSpec scaled(const OperatorSpec& spec, double lambda) {
    require(std::isfinite(lambda) && lambda > 0.0, ErrorCode::InvalidParams, "scale must be positive");
    OperatorSpec out = spec;
    out.kind = OperatorKind::Custom;
    out.name = std::to_string(lambda) + "*" + spec.name;
    out.a = [a = spec.a, lambda](double s) { return lambda * a(s); };
    out.a_prime = [a = spec.a_prime, lambda](double s) { return lambda * a(s); };
    if (spec.a_gap) out.a_gap = [g = spec.a_gap, lambda](double s) { return lambda * g(s); };
    out.constants.growth_c *= lambda;
    out.constants.lower_dbar *= lambda;
    if (spec.k0) out.k0 = lambda * *spec.k0;
    if (spec.flux_ratio_at_zero) out.flux_ratio_at_zero = lambda * *spec.flux_ratio_at_zero;
    return out;
}

namespace {

// Safeguarded Newton in u = log s for a monotone target. `residual(s)` must be
// increasing in s with a root inside [lo, hi]; `log_slope(s)` is
// d log(residual + target) / d log s expressed through the caller's variables.
template <class Value, class LogStep>
double bracketed_log_newton(double lo, double hi, double s, const Value& signed_residual,
                            const LogStep& log_step) {
    for (int iter = 0; iter < 200; ++iter) {
        const double r = signed_residual(s);
        if (r == 0.0) return s;
        if (r < 0.0) lo = s;
        else hi = s;
        double next = s * std::exp(log_step(s));
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = std::sqrt(lo * hi);
        if (std::abs(next - s) <= 4.0 * std::numeric_limits<double>::epsilon() * s ||
            hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
            return next;
        s = next;
    }
    return s;
}

}  // namespace

double invert_a(const OperatorSpec& spec, double t, double tol) {
    require(std::isfinite(t) && t >= 0.0, ErrorCode::InvalidParams, "invert_a: t must be finite and >= 0");
    if (t == 0.0) return 0.0;
    if (spec.bounded()) {
        if (!(t < defaults::invert_cap * *spec.k0)) fail(ErrorCode::OutOfRange, "invert_a: t=" + std::to_string(t) + " too close to sup A=" + std::to_string(*spec.k0));
    }
    const auto& c = spec.constants;
    double s0 = std::pow(t / c.lower_dbar, 1.0 / c.lower_q);
    if (!std::isfinite(s0) || s0 <= 0.0) s0 = 1.0;
    double lo = s0, hi = s0;
    for (int i = 0; spec.a(lo) > t; ++i) {
        require(i < 2000, ErrorCode::NoConvergence, "invert_a: cannot bracket from below");
        lo *= 0.5;
    }
    for (int i = 0; spec.a(hi) < t; ++i) {
        require(i < 2000, ErrorCode::NoConvergence, "invert_a: cannot bracket from above");
        hi *= 2.0;
    }
    const double log_t = std::log(t);
    const double s = bracketed_log_newton(
        lo, hi, std::clamp(s0, lo, hi), [&](double x) { return spec.a(x) - t; },
        [&](double x) {
            const double ax = spec.a(x);
            if (!(ax > 0.0)) return std::numeric_limits<double>::quiet_NaN();
            return -(std::log(ax) - log_t) / (spec.a_prime(x) * x / ax);
        });
    const double residual = std::abs(spec.a(s) - t);
    if (!(residual <= tol * std::max(1.0, t))) fail(ErrorCode::NoConvergence, "invert_a: residual " + std::to_string(residual) + " above tolerance");
    return s;
}

double invert_a_gap(const OperatorSpec& spec, double gap, double tol) {
    require(spec.bounded(), ErrorCode::InvalidParams, "invert_a_gap requires a bounded operator");
    const double k0 = *spec.k0;
    require(std::isfinite(gap) && gap > 0.0, ErrorCode::InvalidParams, "invert_a_gap: gap must be positive");
    if (gap >= k0) return 0.0;
    double lo = 1.0, hi = 1.0;
    if (gap > 0.5 * k0) {
        lo = hi = invert_a(spec, k0 - gap, defaults::invert_tol);
        if (lo == 0.0) return 0.0;
    }
    for (int i = 0; spec.gap(lo) < gap; ++i) {
        require(i < 2000, ErrorCode::NoConvergence, "invert_a_gap: cannot bracket from below");
        lo *= 0.5;
    }
    for (int i = 0; spec.gap(hi) > gap; ++i) {
        require(i < 2000, ErrorCode::NoConvergence, "invert_a_gap: cannot bracket from above");
        hi *= 2.0;
    }
    const double log_gap = std::log(gap);
    const double s = bracketed_log_newton(
        lo, hi, std::sqrt(lo * hi), [&](double x) { return gap - spec.gap(x); },
        [&](double x) {
            const double gx = spec.gap(x);
            if (!(gx > 0.0)) return std::numeric_limits<double>::quiet_NaN();
            return (std::log(gx) - log_gap) / (spec.a_prime(x) * x / gx);
        });
    const double residual = std::abs(spec.gap(s) - gap);
    const double floor = spec.a_gap ? 0.0 : 4.0 * std::numeric_limits<double>::epsilon() * k0;
    if (!(residual <= tol * gap + floor)) fail(ErrorCode::NoConvergence, "invert_a_gap: residual " + std::to_string(residual) +
                                          " above tolerance");
    return s;
}

double inverse_flux(const OperatorSpec& spec, double value, double gap) {
    if (spec.bounded() && std::isfinite(gap) && gap < 0.5 * *spec.k0) {
        return invert_a_gap(spec, gap, 1e-12);
    }
    return invert_a(spec, value, defaults::invert_tol);
}

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ConditionCheck* ValidationReport::find(std::string_view name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

ValidationReport validate_structure(const OperatorSpec& spec, int n_samples) {
    require(n_samples >= 16, ErrorCode::InvalidParams, "validate_structure needs at least 16 samples");
    const auto& c = spec.constants;
    std::vector<double> samples(static_cast<std::size_t>(n_samples));
    const double l0 = std::log(defaults::validation_s_min), l1 = std::log(defaults::validation_s_max);
    for (int i = 0; i < n_samples; ++i) samples[i] = std::exp(l0 + (l1 - l0) * i / (n_samples - 1));

    ValidationReport report;

    const double a_zero = spec.a(0.0);
    report.checks.push_back({"a_zero", -std::abs(a_zero), std::abs(a_zero) <= 1e-300});

    double min_prime = kInfinity, min_increment = kInfinity;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        min_prime = std::min(min_prime, spec.a_prime(samples[i]));
        if (i > 0) min_increment = std::min(min_increment, spec.a(samples[i]) - spec.a(samples[i - 1]));
    }
    report.checks.push_back({"monotone", std::min(min_prime, min_increment),
                             min_prime > 0.0 && min_increment > 0.0});

    double growth_margin = kInfinity;
    bool growth_ok = true;
    for (double s : samples) {
        const double bound = c.growth_c * (std::pow(s, c.growth_p - 1.0) + 1.0);
        const double margin = bound - spec.a(s);
        growth_margin = std::min(growth_margin, margin);
        if (margin < -1e-14 * bound) growth_ok = false;
    }
    report.checks.push_back({"growth_upper", growth_margin, growth_ok});

    double lower_margin = kInfinity;
    bool lower_ok = true;
    const double m0 = std::log(defaults::validation_s_min * c.lower_delta0), m1 = std::log(c.lower_delta0);
    for (int i = 0; i < n_samples; ++i) {
        const double s = std::exp(m0 + (m1 - m0) * i / (n_samples - 1));
        const double bound = c.lower_dbar * std::pow(s, c.lower_q);
        const double margin = spec.a(s) - bound;
        lower_margin = std::min(lower_margin, margin);
        if (margin < -1e-14 * bound) lower_ok = false;
    }
    report.checks.push_back({"lower_bound", lower_margin, lower_ok});

    double sup_margin = kInfinity;
    bool sup_ok = spec.k0.has_value();
    if (sup_ok) {
        const double k0 = *spec.k0;
        for (double s : samples) sup_margin = std::min(sup_margin, k0 - spec.a(s));
        if (!(sup_margin > 0.0)) sup_ok = false;
        try {
            const double sampled = sampled_sup(spec.a);
            if (std::isinf(k0)) {
                sup_ok = sup_ok && std::isinf(sampled);
            } else {
                const double mismatch = std::abs(sampled - k0);
                sup_margin = std::min(sup_margin, 1e-6 * std::max(1.0, k0) - mismatch);
                sup_ok = sup_ok && mismatch <= 1e-6 * std::max(1.0, k0);
            }
        } catch (const Error&) {
            sup_ok = false;
        }
    }
    report.checks.push_back({"sup_consistency", sup_margin, sup_ok});
    return report;
}

double estimate_sup(const OperatorSpec& spec) {
    if (spec.k0) return *spec.k0;
    return sampled_sup(spec.a);
}

ClassificationResult classify(const OperatorSpec& spec, double quad_tol) {
    require(quad_tol > 0.0, ErrorCode::InvalidParams, "classify: quad_tol must be positive");
    ClassificationResult result;
    result.k0 = estimate_sup(spec);
    if (std::isinf(result.k0)) {
        result.cls = OperatorClass::SingularType;
        return result;
    }
    OperatorSpec bounded = spec;
    bounded.k0 = result.k0;
    const double k0 = result.k0;
    const int depth = defaults::classify_depth;
    const int k = defaults::regression_points;

    auto integrand = [&](double gap) { return inverse_flux(bounded, k0 - gap, gap) / std::sqrt(gap); };

    std::vector<double> log_gap, log_value, panels;
    double sum = 0.0;
    for (int j = 1; j <= depth; ++j) {
        const double outer = k0 * std::ldexp(1.0, -(j - 1));
        const double inner = k0 * std::ldexp(1.0, -j);
        const auto panel = gauss_kronrod(integrand, inner, outer, quad_tol / (2.0 * j * j), 1e-13);
        require(panel.value > 0.0 && std::isfinite(panel.value), ErrorCode::Inconclusive,
                "classify: non-monotone partial integrals");
        sum += panel.value;
        panels.push_back(panel.value);
        result.partial_integrals.emplace_back(k0 - inner, sum);
        log_gap.push_back(std::log(inner));
        log_value.push_back(std::log(integrand(inner)));
    }
    const std::vector<double> xs(log_gap.end() - k, log_gap.end());
    const std::vector<double> ys(log_value.end() - k, log_value.end());
    const double beta = -regression_slope(xs, ys);
    double lmin = kInfinity, lmax = -kInfinity;
    for (int i = 1; i < k; ++i) {
        const double local = -(ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
        lmin = std::min(lmin, local);
        lmax = std::max(lmax, local);
    }
    const double threshold = defaults::divergence_threshold;
    if (lmax - lmin > 0.1 && lmin < threshold && lmax >= threshold) {
        fail(ErrorCode::Inconclusive, "classify: local exponent unstable across cutoffs (" +
                                          std::to_string(lmin) + ", " + std::to_string(lmax) + ")");
    }
    // Partial integrals saturate geometrically with ratio 2^(β-1) when they converge.
    const double partial_beta = 1.0 + std::log2(panels[depth - 1] / panels[depth - 2]);
    result.divergence_exponent = beta;
    result.cls = (beta >= threshold || partial_beta >= threshold) ? OperatorClass::RemovableType
                                                                   : OperatorClass::SingularType;
    return result;
}

}  // namespace asymlab
