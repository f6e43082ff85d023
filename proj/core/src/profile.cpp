#include "asymlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asymlab/error.hpp"
#include "asymlab/quadrature.hpp"

namespace asymlab {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Hermite5 {
    double f0, d0, c0, f1, d1, c1, h;  // values, slopes, second derivatives, width

    double value(double t) const {
        const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
        const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
        const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
        const double h3 = 10 * t3 - 15 * t4 + 6 * t5;
        const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
        const double h5 = 0.5 * (t3 - 2 * t4 + t5);
        return f0 * h0 + h * d0 * h1 + h * h * c0 * h2 + f1 * h3 + h * d1 * h4 + h * h * c1 * h5;
    }
    // d/dx
    double slope(double t) const {
        const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
        const double h0 = -30 * t2 + 60 * t3 - 30 * t4;
        const double h1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
        const double h2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
        const double h3 = 30 * t2 - 60 * t3 + 30 * t4;
        const double h4 = -12 * t2 + 28 * t3 - 15 * t4;
        const double h5 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
        return (f0 * h0 + f1 * h3) / h + d0 * h1 + d1 * h4 + h * (c0 * h2 + c1 * h5);
    }
};

struct Hermite3 {
    double f0, d0, f1, d1, h;

    static Hermite3 limited(double f0, double d0, double f1, double d1, double h) {
        const double secant = (f1 - f0) / h;
        if (secant == 0.0) return {f0, 0.0, f1, 0.0, h};
        double a = d0 / secant, b = d1 / secant;
        a = std::max(a, 0.0);
        b = std::max(b, 0.0);
        const double r2 = a * a + b * b;
        if (r2 > 9.0) {
            const double tau = 3.0 / std::sqrt(r2);
            a *= tau;
            b *= tau;
        }
        return {f0, a * secant, f1, b * secant, h};
    }

    double value(double t) const {
        const double t2 = t * t, t3 = t2 * t;
        return f0 * (2 * t3 - 3 * t2 + 1) + h * d0 * (t3 - 2 * t2 + t) + f1 * (-2 * t3 + 3 * t2) +
               h * d1 * (t3 - t2);
    }
    double slope(double t) const {
        const double t2 = t * t;
        return (f0 * (6 * t2 - 6 * t) + f1 * (-6 * t2 + 6 * t)) / h + d0 * (3 * t2 - 4 * t + 1) +
               d1 * (3 * t2 - 2 * t);
    }
};

// The quintic is acceptable on an interval when its samples move monotonically
// in the profile's direction and stay within the node values.
bool quintic_monotone(const Hermite5& q, double sign) {
    constexpr int kSamples = 16;
    const double lo = std::min(q.f0, q.f1), hi = std::max(q.f0, q.f1);
    double prev = q.f0;
    for (int k = 1; k <= kSamples; ++k) {
        const double t = static_cast<double>(k) / kSamples;
        const double v = q.value(t);
        if (v < lo || v > hi) return false;
        if (sign * (v - prev) < 0.0) return false;
        if (sign * q.slope(t) < 0.0) return false;
        prev = v;
    }
    return true;
}

}  // namespace

std::string_view to_string(EndpointKind kind) noexcept {
    switch (kind) {
        case EndpointKind::FiniteLimit: return "finiteLimit";
        case EndpointKind::BlowUp: return "blowUp";
        case EndpointKind::DecayToZero: return "decayToZero";
    }
    return "unknown";
}

Profile::Profile(std::vector<double> grid, std::vector<double> values, std::vector<double> slopes,
                 std::vector<double> curvatures, std::pair<double, double> domain, Endpoint lo, Endpoint hi,
                 double quad_tol)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      slopes_(std::move(slopes)),
      curvatures_(std::move(curvatures)),
      domain_(domain),
      lo_(lo),
      hi_(hi),
      quad_tol_(quad_tol) {
    const std::size_t n = grid_.size();
    require(n >= 2, ErrorCode::TooFewNodes, "a profile needs at least two nodes");
    require(values_.size() == n && slopes_.size() == n && curvatures_.size() == n, ErrorCode::DimensionMismatch,
            "profile node arrays differ in length");
    for (std::size_t i = 1; i < n; ++i)
        require(grid_[i] > grid_[i - 1], ErrorCode::InvalidParams, "profile grid must be strictly increasing");
    require(domain_.first <= grid_.front() && domain_.second >= grid_.back(), ErrorCode::InvalidParams,
            "profile domain must contain the grid");

    const double rise = values_.back() - values_.front();
    direction_ = rise > 0.0 ? Monotonicity::Increasing : rise < 0.0 ? Monotonicity::Decreasing : Monotonicity::Constant;
    const double sign = rise > 0.0 ? 1.0 : rise < 0.0 ? -1.0 : 0.0;
    bool strict = true;
    for (std::size_t i = 1; i < n; ++i) {
        const double step = sign * (values_[i] - values_[i - 1]);
        require(step >= 0.0, ErrorCode::StructureViolation, "profile values are not monotone");
        if (step == 0.0 && sign != 0.0) strict = false;
    }
    if (!strict) warnings_.emplace_back("adjacent node values coincide in floating point");

    use_cubic_.assign(n - 1, 0);
    if (sign != 0.0) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const Hermite5 q{values_[i], slopes_[i], curvatures_[i], values_[i + 1], slopes_[i + 1], curvatures_[i + 1],
                             grid_[i + 1] - grid_[i]};
            use_cubic_[i] = quintic_monotone(q, sign) ? 0 : 1;
        }
    }
}

Profile Profile::constant(double value, std::pair<double, double> domain) {
    require(std::isfinite(value), ErrorCode::InvalidParams, "constant profile value must be finite");
    const double a = std::isfinite(domain.first) ? domain.first : std::min(-1.0, domain.second - 1.0);
    const double b = std::isfinite(domain.second) ? domain.second : std::max(1.0, a + 1.0);
    return Profile({a, b}, {value, value}, {0.0, 0.0}, {0.0, 0.0}, domain, {EndpointKind::FiniteLimit, value},
                   {EndpointKind::FiniteLimit, value}, 0.0);
}

bool Profile::contains(double x) const { return x >= domain_.first && x <= domain_.second; }

int Profile::cubic_intervals() const {
    return static_cast<int>(std::count(use_cubic_.begin(), use_cubic_.end(), 1));
}

std::size_t Profile::interval(double x) const {
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    const auto idx = static_cast<std::size_t>(it - grid_.begin());
    return std::clamp<std::size_t>(idx, 1, grid_.size() - 1) - 1;
}

double Profile::tail_value(double x, bool upper) const {
    const std::size_t k = upper ? grid_.size() - 1 : 0;
    const Endpoint& end = upper ? hi_ : lo_;
    const double limit = end.kind == EndpointKind::FiniteLimit ? end.limit : 0.0;
    const double excess = values_[k] - limit;
    if (excess == 0.0 || slopes_[k] == 0.0) return values_[k];
    const double rate = slopes_[k] / excess;
    return limit + excess * std::exp(rate * (x - grid_[k]));
}

double Profile::tail_slope(double x, bool upper) const {
    const std::size_t k = upper ? grid_.size() - 1 : 0;
    const Endpoint& end = upper ? hi_ : lo_;
    const double limit = end.kind == EndpointKind::FiniteLimit ? end.limit : 0.0;
    const double excess = values_[k] - limit;
    if (excess == 0.0 || slopes_[k] == 0.0) return 0.0;
    const double rate = slopes_[k] / excess;
    return slopes_[k] * std::exp(rate * (x - grid_[k]));
}

double Profile::value(double x) const {
    if (!contains(x) || std::isnan(x))
        fail(ErrorCode::DomainExceeded, "profile evaluated at " + std::to_string(x) + " outside [" +
                                            std::to_string(domain_.first) + ", " + std::to_string(domain_.second) + "]");
    if (direction_ == Monotonicity::Constant) return values_.front();
    if (x < grid_.front()) return tail_value(x, false);
    if (x > grid_.back()) return tail_value(x, true);
    const std::size_t i = interval(x);
    const double h = grid_[i + 1] - grid_[i];
    const double t = (x - grid_[i]) / h;
    const double f0 = values_[i], f1 = values_[i + 1];
    double v;
    if (use_cubic_[i]) {
        v = Hermite3::limited(f0, slopes_[i], f1, slopes_[i + 1], h).value(t);
    } else {
        v = Hermite5{f0, slopes_[i], curvatures_[i], f1, slopes_[i + 1], curvatures_[i + 1], h}.value(t);
    }
    return std::clamp(v, std::min(f0, f1), std::max(f0, f1));
}

double Profile::derivative(double x) const {
    if (!contains(x) || std::isnan(x)) fail(ErrorCode::DomainExceeded, "profile derivative outside domain");
    if (direction_ == Monotonicity::Constant) return 0.0;
    if (x < grid_.front()) return tail_slope(x, false);
    if (x > grid_.back()) return tail_slope(x, true);
    const std::size_t i = interval(x);
    const double h = grid_[i + 1] - grid_[i];
    const double t = (x - grid_[i]) / h;
    if (use_cubic_[i]) return Hermite3::limited(values_[i], slopes_[i], values_[i + 1], slopes_[i + 1], h).slope(t);
    return Hermite5{values_[i], slopes_[i], curvatures_[i], values_[i + 1], slopes_[i + 1], curvatures_[i + 1], h}.slope(t);
}

std::vector<double> uniform_nodes(double lo, double hi, int count) {
    require(count >= 2 && lo < hi, ErrorCode::InvalidParams, "uniform_nodes: need count >= 2 and lo < hi");
    std::vector<double> x(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) x[i] = lo + (hi - lo) * i / (count - 1);
    x.back() = hi;
    return x;
}

std::vector<double> graded_nodes(double lo, double hi, int count, double ratio, bool dense_at_lo) {
    require(count >= 3 && lo < hi && ratio >= 1.0, ErrorCode::InvalidParams,
            "graded_nodes: need count >= 3, lo < hi and ratio >= 1");
    const int m = count - 1;
    const double q = std::pow(ratio, 1.0 / (m - 1));
    std::vector<double> w(static_cast<std::size_t>(m));
    double total = 0.0;
    for (int i = 0; i < m; ++i) total += (w[i] = std::pow(q, i));
    std::vector<double> x(static_cast<std::size_t>(count));
    x[0] = 0.0;
    for (int i = 0; i < m; ++i) x[i + 1] = x[i] + w[i] / total;
    for (auto& v : x) v = dense_at_lo ? lo + (hi - lo) * v : hi - (hi - lo) * v;
    if (!dense_at_lo) std::reverse(x.begin(), x.end());
    x.front() = lo;
    x.back() = hi;
    return x;
}

Profile build_profile(const ProfileSource& src) {
    require(src.nodes.size() >= 2, ErrorCode::TooFewNodes, "build_profile needs at least two nodes");
    require(src.quad_tol > 0.0, ErrorCode::InvalidParams, "quad_tol must be positive");
    std::vector<double> x = src.nodes;
    const double span = x.back() - x.front();

    // Panel tolerances are proportional to width with a floor, so the summed
    // error stays below quad_tol / 2 for any node count up to max_nodes.
    const double floor_share = src.quad_tol / std::max(1, src.max_nodes);
    auto panel = [&](double a, double b) {
        const double share = std::max(src.quad_tol * (b - a) / span, floor_share);
        return gauss_kronrod(src.du, a, b, 0.25 * share, 1e-15).value;
    };
    auto accumulate = [&](const std::vector<double>& panels) {
        std::vector<double> v(panels.size() + 1);
        if (src.anchor_at_lo) {
            v.front() = src.anchor_value;
            for (std::size_t i = 0; i < panels.size(); ++i) v[i + 1] = v[i] + panels[i];
        } else {
            v.back() = src.anchor_value;
            for (std::size_t i = panels.size(); i-- > 0;) v[i] = v[i + 1] - panels[i];
        }
        return v;
    };
    auto make = [&](const std::vector<double>& nodes, std::vector<double> values) {
        std::vector<double> d1(nodes.size()), d2(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            d1[i] = src.du(nodes[i]);
            d2[i] = src.d2u(nodes[i]);
        }
        return Profile(nodes, std::move(values), std::move(d1), std::move(d2), src.domain, src.lo, src.hi, src.quad_tol);
    };

    std::vector<double> panels(x.size() - 1);
    for (std::size_t i = 0; i < panels.size(); ++i) panels[i] = panel(x[i], x[i + 1]);
    // Intervals that passed the midpoint test. The interpolant on an interval
    // depends only on its two end nodes, so they need no second look.
    std::vector<char> settled(panels.size(), 0);
    for (;;) {
        const std::vector<double> values = accumulate(panels);
        const Profile current = make(x, values);
        std::vector<double> nx, np;
        std::vector<char> ns;
        nx.reserve(2 * x.size());
        bool changed = false;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            nx.push_back(x[i]);
            const double mid = 0.5 * (x[i] + x[i + 1]);
            bool split = false;
            double left = 0.0, right = 0.0;
            if (!settled[i] && mid > x[i] && mid < x[i + 1]) {
                double fresh;
                if (src.anchor_at_lo) {
                    left = panel(x[i], mid);
                    fresh = values[i] + left;
                } else {
                    right = panel(mid, x[i + 1]);
                    fresh = values[i + 1] - right;
                }
                const double target = std::max(2.0 * src.quad_tol, 32.0 * kEps * std::abs(fresh));
                split = std::abs(current.value(mid) - fresh) > target;
            }
            if (split) {
                if (src.anchor_at_lo)
                    right = panel(mid, x[i + 1]);
                else
                    left = panel(x[i], mid);
                nx.push_back(mid);
                np.push_back(left);
                np.push_back(right);
                ns.push_back(0);
                ns.push_back(0);
                changed = true;
            } else {
                np.push_back(panels[i]);
                ns.push_back(1);
            }
        }
        nx.push_back(x.back());
        if (!changed) return current;
        if (static_cast<int>(nx.size()) > src.max_nodes) {
            Profile capped = current;
            capped.add_warning("node cap " + std::to_string(src.max_nodes) +
                               " reached before the interpolant met its tolerance");
            return capped;
        }
        x = std::move(nx);
        panels = std::move(np);
        settled = std::move(ns);
    }
}

}  // namespace asymlab
