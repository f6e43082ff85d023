#pragma once

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "asymlab/defaults.hpp"

namespace asymlab {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Globally adaptive 10/21-point Gauss–Kronrod on a finite interval. Stops
/// once the summed |K21 - G10| estimate is below max(abs_tol, rel_tol·|I|).
QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                               double abs_tol, double rel_tol = 1e-14, int max_panels = 4000);

/// Integrand for improper integrals. `gap` is the distance from x to the
/// singular end (+inf when x is not measured from a finite singular end) and
/// lets callers evaluate near-endpoint values without cancellation.
using Integrand = std::function<double(double x, double gap)>;

enum class SingularEnd { Lower, Upper };

struct QuadratureOptions {
    int min_depth = 12;
    int max_depth = 160;
    int regression_points = defaults::regression_points;
    double divergence_threshold = defaults::divergence_threshold;
    double stability_band = 0.1;
};

/// Either a value or a divergence verdict with the fitted local exponent β of
/// the integrand near the singular end (integrand ~ gap^-β; after mapping for
/// infinite ends).
struct QuadratureOutcome {
    bool divergent = false;
    double value = std::numeric_limits<double>::quiet_NaN();
    double error = std::numeric_limits<double>::quiet_NaN();
    double exponent = std::numeric_limits<double>::quiet_NaN();
    int depth = 0;
    std::vector<std::pair<double, double>> partial_sums;  // (cutoff abscissa, cumulative value)
};

/// Dyadic refinement toward `singular_end`, which is either a finite endpoint
/// where the integrand may blow up or an infinite endpoint. The opposite end
/// must be finite and regular. Throws Inconclusive when the local exponent
/// keeps wandering across the divergence threshold.
QuadratureOutcome improper_quadrature(const Integrand& integrand, std::pair<double, double> interval,
                                      SingularEnd singular_end, double tol,
                                      const QuadratureOptions& options = {});

/// Least-squares slope of y against x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace asymlab
