#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "asymlab/defaults.hpp"
#include "asymlab/field_synthesis.hpp"
#include "asymlab/hyperbolic_geometry.hpp"
#include "asymlab/operator_family.hpp"

namespace asymlab {

enum class RadialCoordinates { Spherical, Horospherical };

/// Nodes on [r0, r1]: uniform, or geometrically graded towards r0 with the
/// given ratio between the widest and the narrowest cell.
struct RadialGrid {
    double r0 = 1.0;
    double r1 = 2.0;
    int nodes = 512;
    double grading = 1.0;
    RadialCoordinates coordinates = RadialCoordinates::Spherical;

    std::vector<double> abscissae() const;
};

struct SolverResult {
    std::vector<double> values;
    double residual_norm = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    std::vector<double> damping_history;   // accepted step lengths; 0 marks a Picard step
    std::vector<double> residual_history;  // residual norm after each accepted step, starting with the initial guess
    std::string status;                    // "ok", or the reason the iteration stopped
};

struct RadialSolution : SolverResult {
    std::vector<double> nodes;
    double flux_constant = 0.0;  // κ in A(|u'|)·w = κ
};

/// u on the grid for A'(u')u'' + A(u')·coef = 0 with coef = (n-1)√c coth(√c r)
/// (spherical) or -(n-1)√c (horospherical). Uses the first integral
/// A(|u'|)·w = κ, w = sinh^{n-1}(√c r) or e^{-(n-1)√c s}, and a safeguarded
/// Newton iteration on κ; values follow by cumulative quadrature. Throws
/// NoConvergence when a bounded operator cannot carry the requested jump.
RadialSolution solve_radial_bvp(const OperatorSpec& spec, int n, double c, const RadialGrid& grid, double u_lo,
                                double u_hi, double tol = defaults::solver_tol);

/// Tensor grid in geodesic polar coordinates of H²(-c) about the origin.
///
/// Radii are uniform, r_i = r_in + i·Δr (i = 0..nr). Angles are
/// θ_j = θ_p + 2 atan2(κ sin(ψ_j/2), cos(ψ_j/2)) with ψ_j = 2πj/nθ, where θ_p
/// is the direction of the puncture (0 without one) and κ = clustering. This is
/// the boundary action of a hyperbolic translation: κ < 1 packs nodes towards
/// the puncture by the factor κ and thins them on the opposite side by 1/κ.
/// κ = 1 gives the uniform grid. With r_in = 0, node row 0 is the single
/// centre node; otherwise it is an inner Dirichlet circle.
struct DiskGrid {
    double r_trunc = 4.0;
    int nr = 96;
    int ntheta = 128;
    double c = 1.0;
    double r_inner = 0.0;
    std::optional<IdealPoint> puncture;
    double clustering = 1.0;

    double dr() const { return (r_trunc - r_inner) / nr; }
    double radius(int i) const { return r_inner + i * dr(); }
    /// Node angle; `theta_at(j + 0.5)` is the face between nodes j and j+1.
    double theta(int j) const { return theta_at(j); }
    double theta_at(double j) const;
    /// Angular extent of the cell around node j (between its two faces).
    double cell_width(int j) const;
    /// θ_{j+1} - θ_j, wrapped to (0, 2π).
    double spacing(int j) const;
    bool has_center() const { return r_inner == 0.0; }
    /// Index into SolverResult::values, row-major (i, j); row 0 repeats the centre value.
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * ntheta + static_cast<std::size_t>(j); }
    std::size_t size() const { return static_cast<std::size_t>(nr + 1) * ntheta; }
    Point node(int i, int j) const;
    Model model() const { return {2, c}; }
    void validate() const;
};

enum class BoundarySampling { Pointwise, CellAverage };

struct DiskOptions {
    double inner_value = 0.0;  // Dirichlet value on r = r_inner (annulus grids)
    std::function<double(double)> inner_data;  // overrides inner_value when set
    BoundarySampling sampling = BoundarySampling::Pointwise;
    double regularization = defaults::gradient_regularization;
    int max_iterations = defaults::newton_max_iterations;
    std::function<double(int, int)> initial_guess;  // (i, j) -> value
};

/// Damped Newton for the finite-volume discretisation of div(A(|∇u|)/|∇u| ∇u) = 0
/// with Dirichlet data on the truncation circle. A(s)/s is evaluated at
/// s_ε = √(|∇u|² + ε²) with ε = regularization·max(1, data oscillation / r_trunc).
/// Armijo backtracking, Picard fallback. Non-convergence is reported, not thrown.
SolverResult solve_disk(const OperatorSpec& spec, const DiskGrid& grid, const std::function<double(double)>& boundary_data,
                        double tol = defaults::solver_tol, const DiskOptions& options = {});

/// max over cells of |discrete Q(u)|, the quantity solve_disk drives below tol.
double disk_residual(const OperatorSpec& spec, const DiskGrid& grid, const std::vector<double>& values,
                     double regularization = defaults::gradient_regularization);

struct ProbeGrid {
    double nodes_per_unit = 24.0;  // radial nodes per unit of r_trunc
    int ntheta = 128;
    double annulus_lo = 1.0;       // compact annulus where sups are reported
    double annulus_hi = 2.0;
    double tol = defaults::solver_tol;
    BoundarySampling sampling = BoundarySampling::Pointwise;
    double clustering = defaults::angular_clustering;  // node packing towards p1 (see DiskGrid)
};

struct ProbeEntry {
    double r_trunc = 0.0;
    double spike_width = 0.0;    // 0 when the data are a field trace
    double sup = 0.0;            // solution sup on the annulus
    double reference_sup = std::numeric_limits<double>::quiet_NaN();  // trace field sup on the same nodes
    bool converged = false;
    int iterations = 0;
    double residual_norm = 0.0;
};

struct ProbeReport {
    std::string operator_name;
    double plateau = 0.0;
    bool trace_data = false;
    std::vector<ProbeEntry> entries;  // ordered by r_trunc
    std::vector<SolverResult> solutions;
    std::vector<DiskGrid> grids;

    /// |sup_k - sup_{k-1}| for the two largest truncation radii.
    double last_increment() const;
};

/// Solves on truncated disks of radius R for each R in r_sequence with
/// boundary data `plateau` within angular distance w(R) = 2/R of p1 and 0
/// elsewhere, or (when `trace` is set) the trace of that field on the circle.
ProbeReport removability_probe(const OperatorSpec& spec, const IdealPoint& p1, double plateau,
                               const std::vector<double>& r_sequence, const ProbeGrid& grid_params,
                               const std::optional<ScalarField>& trace = std::nullopt, bool parallel = false);

struct ComparisonReport {
    double min_margin = 0.0;   // min over interior nodes of v - u
    double allowance = 0.0;    // C h² slack granted below zero
    int violations = 0;
    bool passed() const { return violations == 0; }
};

/// Checks v >= u - allowance at interior nodes after verifying v >= u on the
/// discrete boundary (BoundaryOrderViolated otherwise).
ComparisonReport comparison_check(const SolverResult& u, const DiskGrid& grid, const ScalarField& v,
                                  double allowance = 0.0);
ComparisonReport comparison_check(const SolverResult& u, const DiskGrid& grid, const SolverResult& v,
                                  double allowance = 0.0);

}  // namespace asymlab
