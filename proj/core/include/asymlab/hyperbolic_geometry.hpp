#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <variant>
#include <vector>

namespace asymlab {

using Vec = Eigen::VectorXd;

/// H^n(-c) in the Poincaré ball: metric (2/√c)|dx| / (1 - |x|²).
struct Model {
    int n = 2;
    double c = 1.0;

    double sqrt_c() const;
    bool operator==(const Model&) const = default;
};

class Point {
public:
    Point(Vec x, Model model);

    const Vec& x() const { return x_; }
    const Model& model() const { return model_; }
    int n() const { return model_.n; }
    double c() const { return model_.c; }

    static Point origin(Model model);

private:
    Vec x_;
    Model model_;
};

class IdealPoint {
public:
    /// Renormalises inputs within 1e-9 of the unit sphere; rejects the rest.
    explicit IdealPoint(Vec xi);

    const Vec& xi() const { return xi_; }
    int n() const { return static_cast<int>(xi_.size()); }

private:
    Vec xi_;
};

struct Geodesic {
    Geodesic(IdealPoint from, IdealPoint to);
    IdealPoint from;
    IdealPoint to;
};

struct Horosphere {
    Horosphere(IdealPoint ideal, Point through);
    IdealPoint ideal;
    Point through;
};

/// Totally geodesic hypersurface orthogonal to the diameter towards `center`
/// at signed distance `offset` from the origin. Its positive side is the
/// hyperball centred at `center`.
struct Hyperplane {
    IdealPoint center;
    double offset = 0.0;
};

namespace generator {
struct Orthogonal {
    Eigen::MatrixXd q;
};
/// Hyperbolic translation along the diameter through `a`, sending 0 to a.
struct Shift {
    Vec a;
};
/// Inversion in a sphere orthogonal to the unit sphere.
struct SphereInversion {
    Vec center;
    double radius = 1.0;
};
}  // namespace generator

using Generator = std::variant<generator::Orthogonal, generator::Shift, generator::SphereInversion>;

/// A ball-model isometry as a composition of Möbius generators; the last
/// generator in the list is applied first.
class Isometry {
public:
    Isometry() = default;
    explicit Isometry(std::vector<Generator> generators) : generators_(std::move(generators)) {}

    static Isometry identity() { return {}; }

    Vec apply(const Vec& x) const;
    Isometry inverse() const;
    /// (*this) ∘ other
    Isometry compose(const Isometry& other) const;

    const std::vector<Generator>& generators() const { return generators_; }

private:
    std::vector<Generator> generators_;
};

double hyp_distance(const Point& x, const Point& y);
double dist_to_geodesic(const Point& x, const Geodesic& g);
double signed_distance(const Point& x, const Hyperplane& plane);
/// Signed horospherical distance: positive inside the horoball, zero on the
/// horosphere and -> -inf towards every other ideal point.
double busemann(const Point& x, const Horosphere& h);

Isometry mobius_fix_ideal(const IdealPoint& xi, double translation, const Model& model);
/// Parabolic isometry fixing `xi`; `w` must be orthogonal to xi. Points of the
/// horosphere at xi through the origin move by horocyclic length 2|w|/√c.
Isometry parabolic_fix_ideal(const IdealPoint& xi, const Vec& w);
Point apply_isometry(const Isometry& t, const Point& x);
IdealPoint apply_isometry(const Isometry& t, const IdealPoint& xi);
Geodesic apply_isometry(const Isometry& t, const Geodesic& g);
Horosphere apply_isometry(const Isometry& t, const Horosphere& h);

enum class DistanceMode { Sphere, Horosphere };
/// Laplacian of the distance-to-point function at radius r (Sphere) or of the
/// signed horospherical distance (Horosphere) in H^n(-c).
double laplacian_distance(double r, double c, int n, DistanceMode mode);

/// Point on the diameter towards `direction` at hyperbolic distance `t` (t may be negative).
Point point_along(const IdealPoint& direction, double t, const Model& model);
/// Unit-speed parametrisation of a geodesic; t -> +inf approaches g.to.
Point geodesic_point(const Geodesic& g, double t, const Model& model);
/// Isometry carrying the diameter from -e1 to e1 onto g (n = 2 only),
/// with the positive e2 side mapped to the positive side of hyperplane_of(g).
Isometry geodesic_frame(const Geodesic& g, const Model& model);
/// In H² every geodesic is a hyperplane.
Hyperplane hyperplane_of(const Geodesic& g, const Model& model);

/// Random isometry (orthogonal ∘ shift ∘ parabolic) with shift radius below max_shift.
Isometry random_isometry(std::mt19937_64& rng, int n, double max_shift = 0.8);

/// Second-order conservative finite-difference Laplace–Beltrami in ball coordinates.
double fd_metric_laplacian(const std::function<double(const Vec&)>& f, const Vec& x, double h,
                           const Model& model);
/// Riemannian gradient norm by central differences.
double fd_metric_gradient_norm(const std::function<double(const Vec&)>& f, const Vec& x, double h,
                               const Model& model);
/// Conformal factor λ(x) = 2 / (√c (1 - |x|²)).
double conformal_factor(const Vec& x, const Model& model);

}  // namespace asymlab
