#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asymlab/defaults.hpp"
#include "asymlab/operator_family.hpp"

namespace asymlab {

enum class EndpointKind { FiniteLimit, BlowUp, DecayToZero };
std::string_view to_string(EndpointKind kind) noexcept;

struct Endpoint {
    EndpointKind kind = EndpointKind::FiniteLimit;
    double limit = 0.0;  // meaningful for FiniteLimit (and 0 for DecayToZero)

    bool operator==(const Endpoint&) const = default;
};

enum class Monotonicity { Increasing, Decreasing, Constant };

/// A strictly monotone 1-D function tabulated at nodes together with its first
/// and second derivatives.
///
/// Between nodes it is a quintic Hermite interpolant. Intervals on which the
/// quintic would overshoot fall back to a Fritsch–Carlson limited cubic, so the
/// interpolant is monotone and stays between neighbouring node values.
///
/// The domain may extend past the nodes towards an end with a finite limit or
/// decay to zero. There the profile follows the exponential approach
/// u = L + (u_end - L) e^{λ(x - x_end)} matched to the last node, which is
/// exact for the exponentially decaying tails of the barrier profiles and
/// bounded by the certified truncation error otherwise.
class Profile {
public:
    Profile(std::vector<double> grid, std::vector<double> values, std::vector<double> slopes,
            std::vector<double> curvatures, std::pair<double, double> domain, Endpoint lo, Endpoint hi,
            double quad_tol);

    static Profile constant(double value, std::pair<double, double> domain = {-kInfinity, kInfinity});

    double operator()(double x) const { return value(x); }
    double value(double x) const;
    /// Derivative of the interpolant (exact node slopes at nodes).
    double derivative(double x) const;

    bool contains(double x) const;
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& slopes() const { return slopes_; }
    const std::vector<double>& curvatures() const { return curvatures_; }
    std::pair<double, double> domain() const { return domain_; }
    const Endpoint& endpoint_lo() const { return lo_; }
    const Endpoint& endpoint_hi() const { return hi_; }
    double quad_tol() const { return quad_tol_; }
    Monotonicity direction() const { return direction_; }
    std::size_t size() const { return grid_.size(); }
    /// Number of intervals using the limited cubic instead of the quintic.
    int cubic_intervals() const;

    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

private:
    double tail_value(double x, bool upper) const;
    double tail_slope(double x, bool upper) const;
    std::size_t interval(double x) const;

    std::vector<double> grid_, values_, slopes_, curvatures_;
    std::vector<char> use_cubic_;
    std::pair<double, double> domain_;
    Endpoint lo_, hi_;
    double quad_tol_ = 0.0;
    Monotonicity direction_ = Monotonicity::Constant;
    std::vector<std::string> warnings_;
};

/// Everything needed to tabulate u(x) = anchor_value ± ∫ du from a known value
/// at one end of the node range.
struct ProfileSource {
    std::function<double(double)> du;   // signed first derivative
    std::function<double(double)> d2u;  // second derivative
    std::vector<double> nodes;          // initial abscissae, strictly increasing
    bool anchor_at_lo = true;
    double anchor_value = 0.0;
    double quad_tol = defaults::quad_tol;
    int max_nodes = defaults::profile_max_nodes;
    std::pair<double, double> domain;
    Endpoint lo, hi;
};

/// Cumulative Gauss–Kronrod quadrature on the nodes followed by midpoint
/// refinement until the interpolant reproduces fresh quadrature within
/// max(2·quad_tol, 32 ε |u|) on every interval.
Profile build_profile(const ProfileSource& source);

std::vector<double> uniform_nodes(double lo, double hi, int count);
/// Geometric spacing, densest at `lo` when `dense_at_lo` and at `hi` otherwise;
/// `ratio` is the width ratio between the widest and narrowest interval.
std::vector<double> graded_nodes(double lo, double hi, int count, double ratio, bool dense_at_lo);

}  // namespace asymlab
