#include "asymlab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "asymlab/error.hpp"

namespace asymlab {
namespace {

// Kronrod abscissae (descending, last is the centre) and weights; the odd
// entries are the 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077723147540009, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kInfinityGap = std::numeric_limits<double>::infinity();

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gk21(const std::function<double(double)>& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kWgk[10];
    double gauss = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double dx = half * kXgk[k];
        const double sum = f(centre - dx) + f(centre + dx);
        kronrod += kWgk[k] * sum;
        if (k % 2 == 1) gauss += kWg[k / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                               double abs_tol, double rel_tol, int max_panels) {
    if (a == b) return {0.0, 0.0, 0, true};
    if (a > b) {
        auto r = gauss_kronrod(f, b, a, abs_tol, rel_tol, max_panels);
        r.value = -r.value;
        return r;
    }
    std::priority_queue<Panel> panels;
    Panel first = gk21(f, a, b);
    panels.push(first);
    double total = first.value;
    double total_error = first.error;
    int evaluations = 21;
    int count = 1;
    while (total_error > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_panels) {
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted at double resolution
        panels.pop();
        const Panel left = gk21(f, worst.a, mid);
        const Panel right = gk21(f, mid, worst.b);
        evaluations += 42;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    // Re-sum to shed the drift of the incremental updates.
    double value = 0.0;
    double error = 0.0;
    while (!panels.empty()) {
        value += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    const bool converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
    return {value, error, evaluations, converged};
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

QuadratureOutcome improper_quadrature(const Integrand& integrand, std::pair<double, double> interval,
                                      SingularEnd singular_end, double tol,
                                      const QuadratureOptions& options) {
    const auto [lo, hi] = interval;
    require(lo < hi, ErrorCode::InvalidParams, "improper_quadrature: empty interval");
    require(tol > 0.0, ErrorCode::InvalidParams, "improper_quadrature: tol must be positive");
    require(options.regression_points >= 2 && options.min_depth > options.regression_points &&
                options.max_depth >= options.min_depth,
            ErrorCode::InvalidParams, "improper_quadrature: inconsistent depth options");

    const bool upper = singular_end == SingularEnd::Upper;
    const double regular = upper ? lo : hi;
    const double singular = upper ? hi : lo;
    require(std::isfinite(regular), ErrorCode::InvalidParams,
            "improper_quadrature: the regular end must be finite");

    // Map to a coordinate g in (0, length] that vanishes at the singular end.
    const bool infinite = !std::isfinite(singular);
    const double length = infinite ? 1.0 : (hi - lo);
    auto abscissa = [&](double g) {
        if (infinite) return upper ? regular + (1.0 / g - 1.0) : regular - (1.0 / g - 1.0);
        return upper ? singular - g : singular + g;
    };
    auto mapped = [&](double g) {
        if (infinite) return integrand(abscissa(g), kInfinityGap) / (g * g);
        return integrand(abscissa(g), g);
    };

    QuadratureOutcome out;
    std::vector<double> log_gap, log_value;
    double sum = 0.0;
    double quad_error = 0.0;
    const int k = options.regression_points;

    for (int j = 1; j <= options.max_depth; ++j) {
        const double g_outer = length * std::ldexp(1.0, -(j - 1));
        const double g_inner = length * std::ldexp(1.0, -j);
        const double panel_tol = tol / (2.0 * j * j);
        const auto panel = gauss_kronrod(mapped, g_inner, g_outer, panel_tol, 1e-13);
        sum += panel.value;
        quad_error += panel.error;
        out.partial_sums.emplace_back(abscissa(g_inner), sum);
        out.depth = j;

        const double f_inner = std::abs(mapped(g_inner));
        log_gap.push_back(std::log(g_inner));
        log_value.push_back(f_inner > 0.0 ? std::log(f_inner) : -kInfinityGap);

        if (j < options.min_depth) continue;

        // Integrand underflowed: nothing left to pick up.
        if (f_inner == 0.0 && std::abs(panel.value) <= tol) {
            out.value = sum;
            out.error = quad_error;
            out.exponent = -kInfinityGap;
            return out;
        }

        const std::vector<double> xs(log_gap.end() - k, log_gap.end());
        const std::vector<double> ys(log_value.end() - k, log_value.end());
        if (!std::all_of(ys.begin(), ys.end(), [](double v) { return std::isfinite(v); })) continue;
        const double beta = -regression_slope(xs, ys);
        double lmin = kInfinityGap, lmax = -kInfinityGap;
        for (int i = 1; i < k; ++i) {
            const double local = -(ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            lmin = std::min(lmin, local);
            lmax = std::max(lmax, local);
        }
        const double spread = lmax - lmin;
        out.exponent = beta;
        const bool last = j == options.max_depth;

        if (spread <= options.stability_band || last) {
            const bool straddles = lmin < options.divergence_threshold && lmax >= options.divergence_threshold;
            if (beta >= options.divergence_threshold && (!straddles || spread <= 1e-3)) {
                out.divergent = true;
                out.value = sum;
                out.error = quad_error;
                return out;
            }
            if (beta < options.divergence_threshold && lmax < 1.0) {
                auto tail = [&](double b) { return f_inner * g_inner / (1.0 - b); };
                const double tail_value = tail(beta);
                const double b_hi = std::min(beta + spread, 0.5 * (1.0 + lmax));
                const double tail_error = std::abs(tail(b_hi) - tail(beta - spread));
                if (tail_error <= 0.5 * tol || std::abs(tail_value) <= 0.5 * tol) {
                    out.value = sum + tail_value;
                    out.error = quad_error + tail_error;
                    return out;
                }
            }
            if (last) {
                fail(ErrorCode::Inconclusive,
                     "improper_quadrature: local exponent " + std::to_string(beta) +
                         " not resolved against threshold after " + std::to_string(j) + " levels");
            }
        }
    }
    fail(ErrorCode::Inconclusive, "improper_quadrature: depth exhausted");
}

}  // namespace asymlab
