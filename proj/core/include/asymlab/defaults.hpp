#pragma once

// Default numerical tolerances. Every experiment and acceptance run pulls its
// defaults from here; config files may override individual entries.

namespace asymlab::defaults {

// Quadrature
inline constexpr double quad_tol = 1e-10;
inline constexpr double invert_tol = 1e-13;
inline constexpr double invert_cap = 0.999999;  // fraction of a finite sup A reachable by invert_a

// Operator classification
inline constexpr double divergence_threshold = 0.95;  // local exponent at/above which the integral diverges
inline constexpr int classify_depth = 24;             // dyadic cutoffs K0(1 - 2^-j), j = 1..depth
inline constexpr int regression_points = 4;

// Structural validation
inline constexpr int validation_samples = 64;
inline constexpr double validation_s_min = 1e-6;
inline constexpr double validation_s_max = 1e3;
inline constexpr double plaplace_lower_eps = 1e-9;  // D̄ = 1 - eps for builtin p-Laplacians

// Profiles
inline constexpr int profile_nodes = 256;
inline constexpr int profile_max_nodes = 1 << 15;

// Barrier constants
inline constexpr double alpha_safety = 0.9;
inline constexpr double alpha_min = 1e-8;

// Residual checks
inline constexpr double grad_eps = 1e-8;
inline constexpr double residual_tol = 1e-6;
inline constexpr double allowance_factor = 10.0;

// Nonlinear solvers
inline constexpr double solver_tol = 1e-8;
inline constexpr double gradient_regularization = 1e-6;
inline constexpr double armijo_factor = 0.5;
inline constexpr double min_step = 1.0 / (1 << 20);
inline constexpr int newton_max_iterations = 60;

// Removability probe
inline constexpr double spike_width_numerator = 2.0;  // w(R) = 2 / R
inline constexpr double angular_clustering = 0.05;    // node packing towards the puncture

}  // namespace asymlab::defaults
