#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace asymlab {

using ScalarFn = std::function<double(double)>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class OperatorKind { PLaplacian, MinimalGraph, Custom };

std::string_view to_string(OperatorKind kind) noexcept;

/// Constants of the structural conditions on the flux magnitude A:
///   A(0) = 0, A' > 0;  A(s) <= C (s^(p-1) + 1);  A(s) > D̄ s^q on [0, δ0].
struct StructuralConstants {
    double growth_c = 1.0;
    double growth_p = 1.0;
    double lower_q = 1.0;
    double lower_delta0 = 1.0;
    double lower_dbar = 1.0;

    bool operator==(const StructuralConstants&) const = default;
};

/// The operator div(A(|∇u|)/|∇u| ∇u), described by its flux magnitude A.
///
/// Immutable after construction by one of the factories below. `a_gap`, when
/// present, evaluates k0 - A(s) without cancellation; barrier integrands rely
/// on it to resolve arguments within 1e-12 of a finite supremum.
struct OperatorSpec {
    OperatorKind kind = OperatorKind::Custom;
    std::string name;
    double p = std::numeric_limits<double>::quiet_NaN();  // p-Laplacian exponent
    ScalarFn a;
    ScalarFn a_prime;
    ScalarFn a_gap;
    StructuralConstants constants;
    std::optional<double> k0;                 // sup A, +inf allowed
    std::optional<double> flux_ratio_at_zero; // lim_{s->0} A(s)/s when finite

    double sup() const { return k0.value_or(kInfinity); }
    bool bounded() const { return k0 && *k0 < kInfinity; }
    /// k0 - A(s), using the cancellation-free form when available.
    double gap(double s) const;
};

struct CustomOperator {
    std::string name = "custom";
    ScalarFn a;
    ScalarFn a_prime;
    ScalarFn a_gap;
    StructuralConstants constants;
    std::optional<double> k0;
    std::optional<double> flux_ratio_at_zero;
};

/// Parameters of the named custom formula table (see make_formula_operator).
struct FormulaParams {
    double scale = 1.0;     // K: the supremum of the saturating formulas
    double exponent = 1.0;  // m for saturating_power
};

OperatorSpec make_p_laplacian(double p);
OperatorSpec make_minimal_graph();
/// Validates the declared constants and fills k0 via estimate_sup when absent.
OperatorSpec make_custom(CustomOperator def);

/// Builtin custom formulas:
///   rational          A(s) = K s / (1 + s)
///   saturating_power  A(s) = K (1 - (1 + s)^-m)
///   arctan            A(s) = (2K/π) atan(s)
OperatorSpec make_formula_operator(std::string_view formula, FormulaParams params,
                                   StructuralConstants constants,
                                   std::optional<double> declared_k0 = std::nullopt);
std::vector<std::string> formula_names();

struct OperatorParams {
    double p = 2.0;
    std::optional<CustomOperator> custom;
};
OperatorSpec make_operator(OperatorKind kind, const OperatorParams& params);

/// A replaced by λ·A; structural constants and k0 rescale accordingly.
OperatorSpec scaled(const OperatorSpec& spec, double lambda);

/// s >= 0 with |A(s) - t| <= tol·max(1, t). Arguments at or above
/// defaults::invert_cap·k0 are rejected with OutOfRange.
double invert_a(const OperatorSpec& spec, double t, double tol);

/// s with k0 - A(s) = gap. Only meaningful for bounded operators; unlike
/// invert_a this resolves targets arbitrarily close to the supremum.
double invert_a_gap(const OperatorSpec& spec, double gap, double tol);

/// A⁻¹ of a flux value known both directly (`value`) and as its distance to
/// the supremum (`gap`, may be +inf when unknown). Picks the better-conditioned
/// route.
double inverse_flux(const OperatorSpec& spec, double value, double gap);

struct ConditionCheck {
    std::string name;
    double worst_margin = 0.0;
    bool passed = false;
};

struct ValidationReport {
    std::vector<ConditionCheck> checks;
    bool passed() const;
    const ConditionCheck* find(std::string_view name) const;
};

ValidationReport validate_structure(const OperatorSpec& spec, int n_samples);

/// sup A: the declared k0 if present, otherwise sampled at s = 10^k.
double estimate_sup(const OperatorSpec& spec);

enum class OperatorClass { RemovableType, SingularType };
std::string_view to_string(OperatorClass c) noexcept;

struct ClassificationResult {
    OperatorClass cls = OperatorClass::SingularType;
    double k0 = kInfinity;
    double divergence_exponent = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<double, double>> partial_integrals;  // (cutoff, value)
};

/// Decides whether ∫_0^{K0} A⁻¹(t)/√(K0 - t) dt diverges (removable-type) or
/// not (singular-type), with K0 = sup A.
ClassificationResult classify(const OperatorSpec& spec, double quad_tol);

}  // namespace asymlab
