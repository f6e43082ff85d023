#include "asymlab/elliptic_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/AutoDiff>
#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <numeric>

#include "asymlab/error.hpp"
#include "asymlab/profile.hpp"
#include "asymlab/quadrature.hpp"

namespace asymlab {
namespace {

double log_sinh(double x) {
    if (x < 1.0) return std::log(std::sinh(x));
    return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2;
}

// ---------------------------------------------------------------------------
// Radial solver

// Safeguarded Newton for an increasing scalar equation F(z) = 0 on [a, b] with
// F(a) < 0 < F(b).
template <class Fn>
double monotone_root(Fn&& fn, double a, double b, double f_tol, std::vector<double>& steps, int& iterations) {
    double z = 0.5 * (a + b);
    for (iterations = 0; iterations < 200; ++iterations) {
        const auto [f, df] = fn(z);
        if (std::abs(f) <= f_tol) return z;
        (f < 0.0 ? a : b) = z;
        double next = z - f / df;
        double step = 1.0;
        if (!(next > a && next < b) || !std::isfinite(next)) {
            next = 0.5 * (a + b);
            step = 0.5;
        }
        steps.push_back(step);
        if (b - a <= 1e-15 * std::max(1.0, std::abs(z))) return next;
        z = next;
    }
    return z;
}

}  // namespace

std::vector<double> RadialGrid::abscissae() const {
    require(nodes >= 16, ErrorCode::InvalidParams, "radial grid needs at least 16 nodes");
    require(r0 < r1 && std::isfinite(r0) && std::isfinite(r1), ErrorCode::InvalidParams, "radial grid needs r0 < r1");
    if (coordinates == RadialCoordinates::Spherical)
        require(r0 > 0.0, ErrorCode::NonpositiveRadius, "spherical radial grid needs r0 > 0");
    if (grading <= 1.0) return uniform_nodes(r0, r1, nodes);
    return graded_nodes(r0, r1, nodes, grading, true);
}

RadialSolution solve_radial_bvp(const OperatorSpec& spec, int n, double c, const RadialGrid& grid, double u_lo,
                                double u_hi, double tol) {
    require(n >= 2 && c > 0.0 && std::isfinite(c), ErrorCode::InvalidParams, "need n >= 2 and c > 0");
    require(std::isfinite(u_lo) && std::isfinite(u_hi), ErrorCode::InvalidParams, "boundary values must be finite");
    require(tol > 0.0, ErrorCode::InvalidParams, "solver tolerance must be positive");
    RadialSolution out;
    out.nodes = grid.abscissae();
    const auto& x = out.nodes;
    const double jump = u_hi - u_lo;
    if (jump == 0.0) {
        out.values.assign(x.size(), u_lo);
        out.residual_norm = 0.0;
        out.converged = true;
        out.status = "constant";
        out.residual_history = {0.0};
        return out;
    }
    const double sign = jump > 0.0 ? 1.0 : -1.0;
    const double target = std::abs(jump);
    const double sc = std::sqrt(c);
    const double m = n - 1;
    const bool spherical = grid.coordinates == RadialCoordinates::Spherical;
    auto log_w = [&](double s) { return spherical ? m * log_sinh(sc * s) : -m * sc * s; };
    const double scale = std::max(1.0, target);
    const double quad_tol = 1e-3 * tol * scale;

    // Flux A(|u'|) = κ / w(s) and its distance to sup A, parametrised by z.
    // Unbounded: κ = e^z. Bounded: κ = κ_max (1 - e^z) with κ_max = k0 · min w.
    const bool bounded = spec.bounded();
    const double lw_min = spherical ? log_w(x.front()) : log_w(x.back());
    struct Flux {
        double value, gap, dvalue_dz;
    };
    auto flux = [&](double s, double z) -> Flux {
        if (!bounded) {
            const double v = std::exp(z - log_w(s));
            return {v, kInfinity, v};
        }
        const double k0 = *spec.k0;
        const double e = std::exp(lw_min - log_w(s));
        const double eta = std::exp(z);
        const double v = k0 * (1.0 - eta) * e;
        const double gap = k0 * (-std::expm1(lw_min - log_w(s)) + eta * e);
        return {v, gap, -k0 * eta * e};
    };
    auto slope = [&](double s, double z) {
        const Flux f = flux(s, z);
        return f.value <= 0.0 ? 0.0 : inverse_flux(spec, f.value, f.gap);
    };
    auto integral = [&](double z) {
        auto fn = [&](double s) { return slope(s, z); };
        auto dfn = [&](double s) {
            const Flux f = flux(s, z);
            if (f.value <= 0.0) return 0.0;
            return f.dvalue_dz / spec.a_prime(inverse_flux(spec, f.value, f.gap));
        };
        const double i = gauss_kronrod(fn, x.front(), x.back(), quad_tol, 1e-15).value;
        const double di = gauss_kronrod(dfn, x.front(), x.back(), quad_tol, 1e-13).value;
        return std::pair{i - target, di};
    };

    double a, b;
    if (bounded) {
        // z -> -inf is the largest flux the operator can carry.
        a = std::log(1e-14);
        b = 0.0;
        const double reach = integral(a).first + target;
        if (!(reach > target)) fail(ErrorCode::NoConvergence, "bounded operator " + spec.name + " carries a jump of at most " + std::to_string(reach) +
                    " on this interval; requested " + std::to_string(target));
        // Largest flux is at small z, so F(z) decreases in z; flip to an increasing function.
        auto flipped = [&](double z) {
            const auto [f, df] = integral(-z);
            return std::pair{f, -df};
        };
        int it = 0;
        const double z = -monotone_root(flipped, -b, -a, 0.1 * tol * scale, out.damping_history, it);
        out.iterations = it;
        out.flux_constant = *spec.k0 * std::exp(lw_min) * (1.0 - std::exp(z));
        a = z;
    } else {
        double lo = 0.0, hi = 0.0;
        while (integral(lo).first > 0.0) lo -= 4.0;
        while (integral(hi).first < 0.0) hi += 4.0;
        int it = 0;
        const double z = monotone_root(integral, lo, hi, 0.1 * tol * scale, out.damping_history, it);
        out.iterations = it;
        out.flux_constant = std::exp(z);
        a = z;
    }

    const double z = a;
    out.values.resize(x.size());
    out.values.front() = u_lo;
    const double span = x.back() - x.front();
    for (std::size_t k = 1; k < x.size(); ++k) {
        const double piece = gauss_kronrod([&](double s) { return slope(s, z); }, x[k - 1], x[k],
                                           quad_tol * (x[k] - x[k - 1]) / span, 1e-15)
                                 .value;
        out.values[k] = out.values[k - 1] + sign * piece;
    }
    out.residual_norm = std::abs(out.values.back() - u_hi) / scale;
    out.residual_history = {out.residual_norm};
    out.converged = out.residual_norm <= tol;
    out.status = out.converged ? "ok" : "NoConvergence: endpoint mismatch above tolerance";
    return out;
}

// ---------------------------------------------------------------------------
// Disk solver

double DiskGrid::theta_at(double j) const {
    const double base = puncture ? std::atan2(puncture->xi()(1), puncture->xi()(0)) : 0.0;
    const double half_psi = std::numbers::pi * j / ntheta;
    return base + 2.0 * std::atan2(clustering * std::sin(half_psi), std::cos(half_psi));
}

double DiskGrid::cell_width(int j) const {
    return std::remainder(theta_at(j + 0.5) - theta_at(j - 0.5), 2.0 * std::numbers::pi) +
           (ntheta <= 1 ? 2.0 * std::numbers::pi : 0.0);
}

double DiskGrid::spacing(int j) const {
    return std::remainder(theta_at(j + 1.0) - theta_at(j), 2.0 * std::numbers::pi);
}

Point DiskGrid::node(int i, int j) const {
    const double rad = std::tanh(0.5 * std::sqrt(c) * radius(i));
    Vec x(2);
    x << rad * std::cos(theta(j)), rad * std::sin(theta(j));
    return Point(x, model());
}

void DiskGrid::validate() const {
    require(std::isfinite(r_trunc) && r_trunc > 0.0, ErrorCode::InvalidParams, "r_trunc must be finite and positive");
    require(r_inner >= 0.0 && r_inner < r_trunc, ErrorCode::InvalidParams, "need 0 <= r_inner < r_trunc");
    require(nr >= 4, ErrorCode::InvalidParams, "disk grid needs nr >= 4");
    require(ntheta >= 8 && ntheta % 2 == 0, ErrorCode::InvalidParams, "nθ must be even and at least 8");
    require(c > 0.0 && std::isfinite(c), ErrorCode::InvalidParams, "curvature magnitude must be positive");
    require(clustering > 0.0 && clustering <= 1.0, ErrorCode::InvalidParams, "clustering must lie in (0, 1]");
    require(!puncture || puncture->n() == 2, ErrorCode::DimensionMismatch, "puncture must be an ideal point of H²");
}

namespace {

using Fixed9 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 9, 1>>;
using Dynamic = Eigen::AutoDiffScalar<Eigen::VectorXd>;

inline double value_of(double v) { return v; }
template <class D>
double value_of(const Eigen::AutoDiffScalar<D>& v) {
    return v.value();
}

// f(s) with f and f' supplied as doubles.
inline double lift(double, double f, double) { return f; }
template <class D>
Eigen::AutoDiffScalar<D> lift(const Eigen::AutoDiffScalar<D>& s, double f, double df) {
    return Eigen::AutoDiffScalar<D>(f, (df * s.derivatives()).eval());
}

class DiskSystem {
public:
    DiskSystem(const OperatorSpec& spec, const DiskGrid& grid, std::vector<double> outer, std::vector<double> inner,
               double eps)
        : spec_(spec), g_(grid), outer_(std::move(outer)), inner_(std::move(inner)), eps_(eps) {
        nr_ = grid.nr;
        nth_ = grid.ntheta;
        dr_ = grid.dr();
        sc_ = std::sqrt(grid.c);
        center_ = grid.has_center();
        width_.resize(nth_);
        gap_.resize(nth_);
        span_.resize(nth_);
        for (int j = 0; j < nth_; ++j) {
            width_[j] = grid.cell_width(j);
            gap_[j] = grid.spacing(j);
        }
        for (int j = 0; j < nth_; ++j) span_[j] = gap_[j] + gap_[(j - 1 + nth_) % nth_];
    }

    int unknowns() const { return (center_ ? 1 : 0) + (nr_ - 1) * nth_; }
    int unknown(int i, int j) const {
        if (i == 0) return center_ ? 0 : -1;
        if (i >= nr_) return -1;
        return (center_ ? 1 : 0) + (i - 1) * nth_ + j;
    }
    double known(int i, int j) const { return i == nr_ ? outer_[j] : inner_[j]; }

    double S(double r) const { return std::sinh(sc_ * r) / sc_; }
    double area(int i) const {
        const double c = g_.c;
        if (i == 0) return 2.0 * std::numbers::pi * (std::cosh(sc_ * 0.5 * dr_) - 1.0) / c;
        const double r = g_.radius(i);
        return (std::cosh(sc_ * (r + 0.5 * dr_)) - std::cosh(sc_ * (r - 0.5 * dr_))) / c;
    }

    // a(s_ε)·g for gradient components (gr, gt); `freeze` drops the dependence of a on u.
    template <class T>
    T flux(const T& gr, const T& gt, const T& along, bool freeze) const {
        using std::sqrt;
        const T s = sqrt(gr * gr + gt * gt + eps_ * eps_);
        const double sv = value_of(s);
        const double a = spec_.a(sv);
        const double ratio = a / sv;
        if (freeze) return ratio * along;
        const double dratio = (spec_.a_prime(sv) * sv - a) / (sv * sv);
        return lift(s, ratio, dratio) * along;
    }

    // Discrete Q(u) at node (i, j), 1 <= i < nr.
    template <class T, class Get>
    T cell(int i, int j, Get&& U, bool freeze) const {
        const int jm = (j - 1 + nth_) % nth_, jp = (j + 1) % nth_;
        const double ro = g_.radius(i) + 0.5 * dr_, ri = g_.radius(i) - 0.5 * dr_;
        const double so = S(ro), si = S(ri), s0 = S(g_.radius(i));
        const double w = width_[j], span = span_[j];
        const T u0 = U(i, j);
        // Radial faces.
        T gr = (U(i + 1, j) - u0) / dr_;
        T gt = ((U(i, jp) - U(i, jm)) + (U(i + 1, jp) - U(i + 1, jm))) / (2.0 * span * so);
        const T f_out = flux(gr, gt, gr, freeze) * (so * w);
        gr = (u0 - U(i - 1, j)) / dr_;
        gt = ((U(i - 1, jp) - U(i - 1, jm)) + (U(i, jp) - U(i, jm))) / (2.0 * span * si);
        const T f_in = flux(gr, gt, gr, freeze) * (si * w);
        // Angular faces.
        gt = (U(i, jp) - u0) / (s0 * gap_[j]);
        gr = ((U(i + 1, j) - U(i - 1, j)) + (U(i + 1, jp) - U(i - 1, jp))) / (4.0 * dr_);
        const T f_plus = flux(gr, gt, gt, freeze) * dr_;
        gt = (u0 - U(i, jm)) / (s0 * gap_[jm]);
        gr = ((U(i + 1, jm) - U(i - 1, jm)) + (U(i + 1, j) - U(i - 1, j))) / (4.0 * dr_);
        const T f_minus = flux(gr, gt, gt, freeze) * dr_;
        return (f_out - f_in + f_plus - f_minus) / (w * area(i));
    }

    template <class T, class Get>
    T center_cell(Get&& U, bool freeze) const {
        const double sh = S(0.5 * dr_);
        T total = T(0.0);
        const T u0 = U(0, 0);
        for (int j = 0; j < nth_; ++j) {
            const int jm = (j - 1 + nth_) % nth_, jp = (j + 1) % nth_;
            const T gr = (U(1, j) - u0) / dr_;
            const T gt = (U(1, jp) - U(1, jm)) / (2.0 * span_[j] * sh);
            total = total + flux(gr, gt, gr, freeze) * (sh * width_[j]);
        }
        return total / area(0);
    }

    double value(const Eigen::VectorXd& u, int i, int j) const {
        const int k = unknown(i, j);
        return k >= 0 ? u(k) : known(i, j);
    }

    Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
        Eigen::VectorXd F(unknowns());
        auto U = [&](int i, int j) { return value(u, i, j); };
        if (center_) F(0) = center_cell<double>(U, false);
        for (int i = 1; i < nr_; ++i)
            for (int j = 0; j < nth_; ++j) F(unknown(i, j)) = cell<double>(i, j, U, false);
        return F;
    }

    Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& u, bool freeze) const {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(unknowns()) * 9 + static_cast<std::size_t>(nth_) + 1);
        if (center_) {
            // Slot 0: centre, slot 1 + j: node (1, j).
            auto U = [&](int i, int j) {
                const int slot = i == 0 ? 0 : 1 + j;
                return Dynamic(value(u, i, j), nth_ + 1, slot);
            };
            const Dynamic r = center_cell<Dynamic>(U, freeze);
            trip.emplace_back(0, 0, r.derivatives()(0));
            for (int j = 0; j < nth_; ++j) trip.emplace_back(0, unknown(1, j), r.derivatives()(1 + j));
        }
        for (int i = 1; i < nr_; ++i) {
            for (int j = 0; j < nth_; ++j) {
                const int jm = (j - 1 + nth_) % nth_, jp = (j + 1) % nth_;
                auto U = [&](int ii, int jj) {
                    const int k = unknown(ii, jj);
                    if (k < 0) return Fixed9(known(ii, jj));
                    const int col = jj == jm ? 0 : jj == j ? 1 : 2;
                    return Fixed9(u(k), 9, 3 * (ii - i + 1) + col);
                };
                const Fixed9 r = cell<Fixed9>(i, j, U, freeze);
                const int row = unknown(i, j);
                const int cols[3] = {jm, j, jp};
                for (int di = 0; di < 3; ++di) {
                    for (int dj = 0; dj < 3; ++dj) {
                        const int k = unknown(i + di - 1, cols[dj]);
                        const double d = r.derivatives()(3 * di + dj);
                        if (k >= 0 && d != 0.0) trip.emplace_back(row, k, d);
                    }
                }
            }
        }
        Eigen::SparseMatrix<double> J(unknowns(), unknowns());
        J.setFromTriplets(trip.begin(), trip.end());
        return J;
    }

private:
    const OperatorSpec& spec_;
    const DiskGrid& g_;
    std::vector<double> outer_, inner_;
    double eps_;
    int nr_ = 0, nth_ = 0;
    double dr_ = 0.0, sc_ = 1.0;
    std::vector<double> width_, gap_, span_;  // cell widths, θ_{j+1} - θ_j, θ_{j+1} - θ_{j-1}
    bool center_ = true;
};

std::optional<Eigen::VectorXd> linear_solve(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& rhs) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) return std::nullopt;
    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) return std::nullopt;
    return x;
}

std::vector<double> sample_circle(const std::function<double(double)>& data, const DiskGrid& grid,
                                  BoundarySampling mode) {
    std::vector<double> out(static_cast<std::size_t>(grid.ntheta));
    for (int j = 0; j < grid.ntheta; ++j) {
        const double th = grid.theta(j);
        if (mode == BoundarySampling::Pointwise) {
            out[j] = data(th);
        } else {
            const double a = grid.theta_at(j - 0.5), w = grid.cell_width(j);
            const double mid = data(th);
            const auto q = gauss_kronrod(data, a, a + w, 1e-13 * w * std::max(1.0, std::abs(mid)));
            out[j] = q.value / w;
        }
        require(std::isfinite(out[j]), ErrorCode::InvalidParams, "boundary data must be finite");
    }
    return out;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

SolverResult solve_disk(const OperatorSpec& spec, const DiskGrid& grid, const std::function<double(double)>& boundary_data,
                        double tol, const DiskOptions& options) {
    grid.validate();
    require(tol > 0.0 && options.max_iterations >= 0 && options.regularization >= 0.0, ErrorCode::InvalidParams,
            "bad solver options");
    const int nth = grid.ntheta;
    std::vector<double> outer = sample_circle(boundary_data, grid, options.sampling);
    std::vector<double> inner(static_cast<std::size_t>(nth), options.inner_value);
    if (!grid.has_center() && options.inner_data) inner = sample_circle(options.inner_data, grid, options.sampling);

    auto [omin, omax] = std::minmax_element(outer.begin(), outer.end());
    double lo = *omin, hi = *omax;
    if (!grid.has_center()) {
        lo = std::min(lo, *std::min_element(inner.begin(), inner.end()));
        hi = std::max(hi, *std::max_element(inner.begin(), inner.end()));
    }
    const double eps = options.regularization * std::max(1.0, (hi - lo) / grid.r_trunc);
    const DiskSystem sys(spec, grid, outer, inner, eps);

    const double mean = std::accumulate(outer.begin(), outer.end(), 0.0) / nth;
    Eigen::VectorXd u(sys.unknowns());
    for (int i = 0; i < grid.nr; ++i) {
        for (int j = 0; j < nth; ++j) {
            const int k = sys.unknown(i, j);
            if (k < 0) continue;
            if (options.initial_guess) {
                u(k) = options.initial_guess(i, j);
            } else if (grid.has_center()) {
                const double t = grid.radius(i) / grid.r_trunc;
                u(k) = mean + t * (outer[j] - mean);
            } else {
                const double t = static_cast<double>(i) / grid.nr;
                u(k) = inner[j] + t * (outer[j] - inner[j]);
            }
        }
    }

    // Without a user guess, start from the discrete harmonic extension of the
    // data: it obeys the maximum principle, which keeps Newton away from the
    // steep spurious iterates that jump data otherwise provoke.
    if (!options.initial_guess) {
        const DiskSystem harmonic(make_p_laplacian(2.0), grid, outer, inner, eps);
        if (const auto step = linear_solve(harmonic.jacobian(u, false), -harmonic.residual(u))) u += *step;
    }

    SolverResult res;
    Eigen::VectorXd F = sys.residual(u);
    double norm = max_abs(F);
    res.residual_history.push_back(norm);
    res.status = "NoConvergence: iteration limit";
    for (int it = 0; it < options.max_iterations && norm > tol; ++it) {
        res.iterations = it + 1;
        bool accepted = false;
        for (const bool picard : {false, true}) {
            const auto step = linear_solve(sys.jacobian(u, picard), -F);
            if (!step) {
                if (picard) fail(ErrorCode::IllConditioned, "Newton and Picard linear solves both failed");
                continue;
            }
            for (double t = 1.0; t >= defaults::min_step; t *= defaults::armijo_factor) {
                const Eigen::VectorXd trial = u + t * *step;
                const Eigen::VectorXd Ft = sys.residual(trial);
                const double nt = max_abs(Ft);
                if (std::isfinite(nt) && nt <= (1.0 - 1e-4 * t) * norm) {
                    u = trial;
                    F = Ft;
                    norm = nt;
                    res.damping_history.push_back(picard ? 0.0 : t);
                    res.residual_history.push_back(norm);
                    accepted = true;
                    break;
                }
                if (picard) break;  // Picard steps are taken whole or not at all
            }
            if (accepted) break;
        }
        if (!accepted) {
            res.status = "NoConvergence: no step decreases the residual";
            break;
        }
    }
    res.residual_norm = norm;
    res.converged = norm <= tol;
    if (res.converged) res.status = "ok";

    res.values.assign(grid.size(), 0.0);
    for (int i = 0; i <= grid.nr; ++i)
        for (int j = 0; j < nth; ++j) res.values[grid.index(i, j)] = sys.value(u, i, j);
    return res;
}

double disk_residual(const OperatorSpec& spec, const DiskGrid& grid, const std::vector<double>& values,
                     double regularization) {
    grid.validate();
    require(values.size() == grid.size(), ErrorCode::DimensionMismatch, "value array does not match the grid");
    const int nth = grid.ntheta;
    std::vector<double> outer(nth), inner(nth);
    for (int j = 0; j < nth; ++j) {
        outer[j] = values[grid.index(grid.nr, j)];
        inner[j] = values[grid.index(0, j)];
    }
    auto [omin, omax] = std::minmax_element(values.begin(), values.end());
    const double eps = regularization * std::max(1.0, (*omax - *omin) / grid.r_trunc);
    const DiskSystem sys(spec, grid, outer, inner, eps);
    Eigen::VectorXd u(sys.unknowns());
    for (int i = 0; i < grid.nr; ++i)
        for (int j = 0; j < nth; ++j)
            if (const int k = sys.unknown(i, j); k >= 0) u(k) = values[grid.index(i, j)];
    return max_abs(sys.residual(u));
}

// ---------------------------------------------------------------------------
// Removability probe

double ProbeReport::last_increment() const {
    if (entries.size() < 2) return 0.0;
    return std::abs(entries.back().sup - entries[entries.size() - 2].sup);
}

ProbeReport removability_probe(const OperatorSpec& spec, const IdealPoint& p1, double plateau,
                               const std::vector<double>& r_sequence, const ProbeGrid& gp,
                               const std::optional<ScalarField>& trace, bool parallel) {
    require(p1.n() == 2, ErrorCode::DimensionMismatch, "the probe runs in H²");
    require(!r_sequence.empty(), ErrorCode::InvalidParams, "R sequence is empty");
    for (std::size_t k = 1; k < r_sequence.size(); ++k)
        require(r_sequence[k] > r_sequence[k - 1], ErrorCode::InvalidParams, "R sequence must increase");
    require(trace || plateau >= 0.0, ErrorCode::InvalidParams, "plateau must be non-negative");
    require(gp.annulus_lo < gp.annulus_hi && gp.annulus_hi < r_sequence.front(), ErrorCode::InvalidParams,
            "probe annulus must sit inside the smallest truncation disk");
    const double c = trace ? trace->model().c : 1.0;
    const double theta_p = std::atan2(p1.xi()(1), p1.xi()(0));

    ProbeReport report;
    report.operator_name = spec.name;
    report.plateau = plateau;
    report.trace_data = trace.has_value();

    auto run = [&](double R) {
        DiskGrid grid;
        grid.r_trunc = R;
        grid.nr = std::max(16, static_cast<int>(std::lround(gp.nodes_per_unit * R)));
        grid.ntheta = gp.ntheta;
        grid.c = c;
        grid.puncture = p1;
        grid.clustering = gp.clustering;
        ProbeEntry e;
        e.r_trunc = R;
        std::function<double(double)> data;
        if (trace) {
            const double rad = std::tanh(0.5 * std::sqrt(c) * R);
            data = [&, rad](double th) {
                Vec x(2);
                x << rad * std::cos(th), rad * std::sin(th);
                return (*trace)(x);
            };
        } else {
            e.spike_width = defaults::spike_width_numerator / R;
            data = [&, w = e.spike_width](double th) {
                const double d = std::remainder(th - theta_p, 2.0 * std::numbers::pi);
                return std::abs(d) <= w ? plateau : 0.0;
            };
        }
        DiskOptions opts;
        opts.sampling = gp.sampling;
        SolverResult sol = solve_disk(spec, grid, data, gp.tol, opts);
        e.converged = sol.converged;
        e.iterations = sol.iterations;
        e.residual_norm = sol.residual_norm;
        double sup = -kInfinity, ref = -kInfinity;
        for (int i = 0; i <= grid.nr; ++i) {
            const double r = grid.radius(i);
            if (r < gp.annulus_lo - 1e-12 || r > gp.annulus_hi + 1e-12) continue;
            for (int j = 0; j < grid.ntheta; ++j) {
                sup = std::max(sup, sol.values[grid.index(i, j)]);
                if (trace) ref = std::max(ref, (*trace)(grid.node(i, j)));
            }
        }
        e.sup = sup;
        if (trace) e.reference_sup = ref;
        return std::tuple{e, std::move(sol), grid};
    };

    std::vector<std::tuple<ProbeEntry, SolverResult, DiskGrid>> results;
    if (parallel) {
        std::vector<std::future<std::tuple<ProbeEntry, SolverResult, DiskGrid>>> jobs;
        for (double R : r_sequence) jobs.push_back(std::async(std::launch::async, run, R));
        for (auto& j : jobs) results.push_back(j.get());
    } else {
        for (double R : r_sequence) results.push_back(run(R));
    }
    for (auto& [e, sol, grid] : results) {
        report.entries.push_back(e);
        report.solutions.push_back(std::move(sol));
        report.grids.push_back(grid);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Comparison

namespace {

template <class V>
ComparisonReport compare(const SolverResult& u, const DiskGrid& grid, V&& v_at, double allowance) {
    grid.validate();
    require(u.values.size() == grid.size(), ErrorCode::DimensionMismatch, "solution does not match the grid");
    require(allowance >= 0.0, ErrorCode::InvalidParams, "allowance must be non-negative");
    ComparisonReport rep;
    rep.allowance = allowance;
    rep.min_margin = kInfinity;
    auto boundary_row = [&](int i) { return i == grid.nr || (i == 0 && !grid.has_center()); };
    for (int i = 0; i <= grid.nr; ++i) {
        for (int j = 0; j < grid.ntheta; ++j) {
            if (i == 0 && grid.has_center() && j > 0) continue;
            const std::optional<double> v = v_at(i, j);
            if (!v) continue;  // outside the comparison function's domain
            const double uu = u.values[grid.index(i, j)];
            const double margin = *v - uu;
            if (boundary_row(i)) {
                if (!(margin >= -1e-12 * std::max(1.0, std::abs(uu)))) fail(ErrorCode::BoundaryOrderViolated, "comparison function lies below the solution on the boundary (node " + std::to_string(i) +
                            ", " + std::to_string(j) + ", margin " + std::to_string(margin) + ")");
                continue;
            }
            rep.min_margin = std::min(rep.min_margin, margin);
            if (margin < -allowance) ++rep.violations;
        }
    }
    return rep;
}

}  // namespace

ComparisonReport comparison_check(const SolverResult& u, const DiskGrid& grid, const ScalarField& v, double allowance) {
    return compare(
        u, grid,
        [&](int i, int j) -> std::optional<double> {
            try {
                return v(grid.node(i, j));
            } catch (const Error& e) {
                if (e.code() == ErrorCode::DomainExceeded) return std::nullopt;
                throw;
            }
        },
        allowance);
}

ComparisonReport comparison_check(const SolverResult& u, const DiskGrid& grid, const SolverResult& v,
                                  double allowance) {
    require(v.values.size() == grid.size(), ErrorCode::DimensionMismatch, "comparison solution does not match the grid");
    return compare(
        u, grid, [&](int i, int j) -> std::optional<double> { return v.values[grid.index(i, j)]; }, allowance);
}

}  // namespace asymlab
