#include "asymlab/field_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "asymlab/error.hpp"
#include "asymlab/quadrature.hpp"

namespace asymlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int kind_dimension(const DistanceKind& kind) {
    return std::visit(Overloaded{[](const distance::ToGeodesic& k) { return k.geodesic.from.n(); },
                                 [](const distance::ToPoint& k) { return k.point.n(); },
                                 [](const distance::Horospherical& k) { return k.horosphere.through.n(); },
                                 [](const distance::ToHyperplane& k) { return k.plane.center.n(); }},
                      kind);
}

// Values of the field on the lattice x + h·{-1,0,1}^n, evaluated on demand.
class Stencil {
public:
    Stencil(const ScalarField& field, const Vec& x, double h) : field_(field), x_(x), h_(h) {}

    double at(int i, int si, int j = -1, int sj = 0) {
        long key = 0;
        const int n = static_cast<int>(x_.size());
        Vec y = x_;
        if (si != 0) y(i) += si * h_;
        if (sj != 0) y(j) += sj * h_;
        for (int k = 0; k < n; ++k) {
            const int off = (k == i ? si : 0) + (k == j ? sj : 0);
            key = 3 * key + (off + 1);
        }
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        double v;
        try {
            v = field_(y);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::DomainExceeded || e.code() == ErrorCode::InvalidParams)
                fail(ErrorCode::StencilOutOfDomain, std::string("residual stencil leaves the field domain: ") + e.what());
            throw;
        }
        cache_.emplace(key, v);
        return v;
    }

private:
    const ScalarField& field_;
    const Vec& x_;
    double h_;
    std::unordered_map<long, double> cache_;
};

}  // namespace

std::string_view distance_name(const DistanceKind& kind) noexcept {
    return std::visit(Overloaded{[](const distance::ToGeodesic&) { return std::string_view("toGeodesic"); },
                                 [](const distance::ToPoint&) { return std::string_view("toPoint"); },
                                 [](const distance::Horospherical&) { return std::string_view("horospherical"); },
                                 [](const distance::ToHyperplane&) { return std::string_view("toHyperplane"); }},
                      kind);
}

ScalarField::ScalarField(Profile profile, DistanceKind kind, Model model, double scale, double shift)
    : profile_(std::move(profile)), kind_(std::move(kind)), model_(model), scale_(scale), shift_(shift) {
    require(kind_dimension(kind_) == model_.n, ErrorCode::DimensionMismatch,
            "distance object and model differ in dimension");
    require(std::isfinite(scale_) && std::isfinite(shift_), ErrorCode::InvalidParams, "field scale/shift must be finite");
}

double ScalarField::distance(const Vec& x) const {
    const Point p(x, model_);
    return std::visit(Overloaded{[&](const distance::ToGeodesic& k) { return dist_to_geodesic(p, k.geodesic); },
                                 [&](const distance::ToPoint& k) { return hyp_distance(p, k.point); },
                                 [&](const distance::Horospherical& k) { return busemann(p, k.horosphere); },
                                 [&](const distance::ToHyperplane& k) { return signed_distance(p, k.plane); }},
                      kind_);
}

double ScalarField::operator()(const Vec& x) const {
    if (profile_.direction() == Monotonicity::Constant) {
        (void)Point(x, model_);  // still reject points outside the ball
        return scale_ * profile_.values().front() + shift_;
    }
    return scale_ * profile_(distance(x)) + shift_;
}

ScalarField compose_field(Profile profile, DistanceKind kind, const Model& model) {
    return ScalarField(std::move(profile), std::move(kind), model);
}

double divergence_residual(const ScalarField& field, const OperatorSpec& spec, const Point& x, double h) {
    require(h > 0.0 && std::isfinite(h), ErrorCode::InvalidParams, "stencil spacing must be positive");
    require(x.model() == field.model(), ErrorCode::DimensionMismatch, "point and field models differ");
    require(x.x().norm() + 2.0 * h < 1.0, ErrorCode::StencilOutOfDomain, "residual stencil leaves the ball");
    const int n = x.n();
    const Model& model = x.model();
    Stencil u(field, x.x(), h);
    const double u0 = u.at(-1, 0);

    double total = 0.0;
    Vec grad(n);
    for (int i = 0; i < n; ++i) {
        double flux[2];
        for (int side = 0; side < 2; ++side) {
            const int s = side == 0 ? 1 : -1;
            grad(i) = s * (u.at(i, s) - u0) / h;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                grad(j) = ((u.at(j, 1) - u.at(j, -1)) + (u.at(i, s, j, 1) - u.at(i, s, j, -1))) / (4.0 * h);
            }
            Vec half = x.x();
            half(i) += 0.5 * s * h;
            const double lam = conformal_factor(half, model);
            const double g = grad.norm() / lam;
            double ratio;
            if (g < defaults::grad_eps) {
                if (spec.flux_ratio_at_zero) {
                    ratio = *spec.flux_ratio_at_zero;
                } else if (g == 0.0) {
                    ratio = 0.0;
                } else {
                    fail(ErrorCode::DegenerateGradient, "|∇u| = " + std::to_string(g) + " below " +
                                                            std::to_string(defaults::grad_eps) +
                                                            " and A(s)/s has no finite limit at 0");
                }
            } else {
                ratio = spec.a(g) / g;
            }
            flux[side] = std::pow(lam, n - 2) * ratio * grad(i);
        }
        total += (flux[0] - flux[1]) / h;
    }
    return total / std::pow(conformal_factor(x.x(), model), n);
}

ResidualReport supersolution_check(const ScalarField& field, const OperatorSpec& spec,
                                   const std::vector<Point>& samples, double h, double tol,
                                   const SupersolutionOptions& options) {
    require(tol >= 0.0 && options.allowance_factor >= 0.0, ErrorCode::InvalidParams, "tolerances must be >= 0");
    ResidualReport report;
    report.points = samples;
    report.h = h;
    report.tol = tol;
    report.allowance_factor = options.allowance_factor;
    report.seed = options.seed;
    report.residuals.reserve(samples.size());
    report.max_signed = -std::numeric_limits<double>::infinity();
    double c = 0.0;
    for (const auto& x : samples) {
        const double r1 = divergence_residual(field, spec, x, h);
        const double r2 = divergence_residual(field, spec, x, 0.5 * h);
        const double r3 = divergence_residual(field, spec, x, 0.25 * h);
        c = std::max({c, std::abs(r1 - r2) / (0.75 * h * h), std::abs(r2 - r3) / (0.75 * 0.25 * h * h)});
        report.residuals.push_back(r1);
        report.max_abs = std::max(report.max_abs, std::abs(r1));
        report.max_signed = std::max(report.max_signed, r1);
    }
    report.allowance_c = c;
    const double threshold = report.threshold();
    report.sign_violations = static_cast<int>(
        std::count_if(report.residuals.begin(), report.residuals.end(), [&](double r) { return r > threshold; }));
    if (samples.empty()) report.max_signed = 0.0;
    return report;
}

std::vector<TraceEntry> boundary_trace(const ScalarField& field, const IdealPoint& target,
                                       const std::vector<Point>& approach) {
    require(target.n() == field.model().n, ErrorCode::DimensionMismatch, "trace target dimension");
    std::vector<TraceEntry> out;
    out.reserve(approach.size());
    for (const auto& p : approach) out.push_back({1.0 - p.x().norm(), field(p)});
    return out;
}

std::string_view to_string(TraceLimit limit) noexcept {
    switch (limit) {
        case TraceLimit::ToZero: return "toZero";
        case TraceLimit::ToConstant: return "toConstant";
        case TraceLimit::ToInfinity: return "toInfinity";
        case TraceLimit::Undetermined: return "undetermined";
    }
    return "unknown";
}

TraceVerdict classify_trace(const std::vector<TraceEntry>& trace, int k, double zero_tol, double grow) {
    TraceVerdict v;
    if (trace.empty()) return v;
    v.last_value = trace.back().value;
    if (static_cast<int>(trace.size()) < std::max(k, 3)) return v;
    std::vector<double> xs, ys;
    for (auto it = trace.end() - k; it != trace.end(); ++it) {
        xs.push_back(-std::log(it->boundary_distance));
        ys.push_back(it->value);
    }
    v.slope = regression_slope(xs, ys);
    bool rising = true, shrinking = true;
    for (int i = 2; i < k; ++i) {
        const double d1 = ys[i - 1] - ys[i - 2], d2 = ys[i] - ys[i - 1];
        rising = rising && d2 > 0.0 && d2 >= d1;
        shrinking = shrinking && std::abs(d2) <= std::abs(d1);
    }
    if (rising && v.slope > grow) {
        v.limit = TraceLimit::ToInfinity;
    } else if (shrinking) {
        v.limit = std::abs(v.last_value) <= zero_tol ? TraceLimit::ToZero : TraceLimit::ToConstant;
    }
    return v;
}

std::vector<Point> radial_approach(const IdealPoint& target, const Model& model, int count, double t_start,
                                   double step) {
    require(count >= 1 && step > 0.0, ErrorCode::InvalidParams, "radial_approach: need count >= 1, step > 0");
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(point_along(target, t_start + step * i, model));
    return out;
}

}  // namespace asymlab
