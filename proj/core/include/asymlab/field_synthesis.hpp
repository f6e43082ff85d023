#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "asymlab/defaults.hpp"
#include "asymlab/hyperbolic_geometry.hpp"
#include "asymlab/operator_family.hpp"
#include "asymlab/profile.hpp"

namespace asymlab {

namespace distance {
struct ToGeodesic {
    Geodesic geodesic;
};
struct ToPoint {
    Point point;
};
struct Horospherical {
    Horosphere horosphere;
};
/// Signed distance to a totally geodesic hypersurface (any n).
struct ToHyperplane {
    Hyperplane plane;
};
}  // namespace distance

using DistanceKind = std::variant<distance::ToGeodesic, distance::ToPoint, distance::Horospherical, distance::ToHyperplane>;

std::string_view distance_name(const DistanceKind& kind) noexcept;

/// x ↦ scale·profile(d(x)) + shift for one of the geometric distance functions.
class ScalarField {
public:
    ScalarField(Profile profile, DistanceKind kind, Model model, double scale = 1.0, double shift = 0.0);

    double distance(const Vec& x) const;
    double operator()(const Vec& x) const;
    double operator()(const Point& x) const { return (*this)(x.x()); }

    const Profile& profile() const { return profile_; }
    const DistanceKind& kind() const { return kind_; }
    const Model& model() const { return model_; }
    double scale() const { return scale_; }
    double shift() const { return shift_; }

    ScalarField negated() const { return ScalarField(profile_, kind_, model_, -scale_, -shift_); }

private:
    Profile profile_;
    DistanceKind kind_;
    Model model_;
    double scale_;
    double shift_;
};

ScalarField compose_field(Profile profile, DistanceKind kind, const Model& model);

/// Q(u)(x) by conservative second-order differences in ball coordinates with
/// stencil spacing h: fluxes sit at the half points x ± h/2·e_i, transverse
/// derivatives there average the two neighbouring centred differences.
double divergence_residual(const ScalarField& field, const OperatorSpec& spec, const Point& x, double h);

struct ResidualReport {
    std::vector<Point> points;
    std::vector<double> residuals;  // at spacing h
    double h = 0.0;
    double tol = 0.0;
    double allowance_c = 0.0;  // C in the allowance factor·C·h²
    double allowance_factor = defaults::allowance_factor;
    double max_abs = 0.0;
    double max_signed = 0.0;
    int sign_violations = 0;
    std::uint64_t seed = 0;

    double threshold() const { return tol + allowance_factor * allowance_c * h * h; }
    bool passed() const { return sign_violations == 0; }
};

struct SupersolutionOptions {
    double allowance_factor = defaults::allowance_factor;
    std::uint64_t seed = 0;  // recorded in the report
};

/// Counts samples with Q(u) > tol + factor·C·h². C is the largest observed
/// |r(h) - r(h/2)| / (0.75 h²) and |r(h/2) - r(h/4)| / (0.75 (h/2)²), i.e. the
/// field's own second-order discretisation constant.
ResidualReport supersolution_check(const ScalarField& field, const OperatorSpec& spec,
                                   const std::vector<Point>& samples, double h, double tol,
                                   const SupersolutionOptions& options = {});

struct TraceEntry {
    double boundary_distance;  // 1 - |x|
    double value;
};

std::vector<TraceEntry> boundary_trace(const ScalarField& field, const IdealPoint& target,
                                       const std::vector<Point>& approach);

enum class TraceLimit { ToZero, ToConstant, ToInfinity, Undetermined };
std::string_view to_string(TraceLimit limit) noexcept;

struct TraceVerdict {
    TraceLimit limit = TraceLimit::Undetermined;
    double last_value = 0.0;
    double slope = 0.0;  // d value / d log(1/(1-|x|)) over the last k entries
};

/// Reads the limit off the last k entries: a growing slope above `grow` means
/// divergence; otherwise the trace settles when its last increments shrink and
/// the limit is zero or a constant depending on |last value| <= zero_tol.
TraceVerdict classify_trace(const std::vector<TraceEntry>& trace, int k = 4, double zero_tol = 1e-6,
                            double grow = 0.1);

/// Points on the diameter towards `target` at hyperbolic distances
/// t_start, t_start + step, ... (count of them).
std::vector<Point> radial_approach(const IdealPoint& target, const Model& model, int count, double t_start,
                                   double step);

}  // namespace asymlab
