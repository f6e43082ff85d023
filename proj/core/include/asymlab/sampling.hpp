#pragma once

#include <cstdint>
#include <vector>

#include "asymlab/hyperbolic_geometry.hpp"

namespace asymlab {

/// Randomly shifted Halton points in [0,1)^dim: the radical-inverse sequence in
/// the first `dim` primes with a Cranley–Patterson rotation drawn from the seed.
/// Index 0 is skipped so no coordinate starts at the origin.
std::vector<std::vector<double>> halton(int count, int dim, std::uint64_t seed);

/// Points of H² with Fermi coordinates (t along g, d > 0 to its positive side),
/// t ∈ [-t_max, t_max], d ∈ [d_min, d_max].
std::vector<Point> sample_tube(const Geodesic& g, const Model& model, int count, double t_max, double d_min,
                               double d_max, std::uint64_t seed);

/// Points at hyperbolic distance r ∈ [r_min, r_max] from `center`.
std::vector<Point> sample_annulus(const Point& center, int count, double r_min, double r_max, std::uint64_t seed);

/// Points whose Busemann value for `h` lies in [b_min, b_max], spread by
/// parabolic translations of Euclidean size at most `spread` around the axis.
std::vector<Point> sample_horoball(const Horosphere& h, int count, double b_min, double b_max, double spread,
                                   std::uint64_t seed);

}  // namespace asymlab
