#include "asymlab/hyperbolic_geometry.hpp"

#include <cmath>
#include <string>

#include "asymlab/error.hpp"

namespace asymlab {
namespace {

void check_same_model(const Point& x, const Point& y) {
    require(x.model() == y.model(), ErrorCode::DimensionMismatch,
            "points live in different models (n or c differ)");
}

void check_dim(const Point& x, int n) {
    if (x.n() != n) fail(ErrorCode::DimensionMismatch, "dimension " + std::to_string(x.n()) + " vs " + std::to_string(n));
}

// 1 - |x|² without the cancellation of forming |x|² first.
double one_minus_sq(const Vec& x) {
    const double r = x.norm();
    return (1.0 - r) * (1.0 + r);
}

// Möbius addition a ⊕ x: the translation along the diameter through a.
Vec mobius_add(const Vec& a, const Vec& x) {
    const double ax = a.dot(x);
    const double aa = a.squaredNorm();
    const double xx = x.squaredNorm();
    const double denom = 1.0 + 2.0 * ax + aa * xx;
    return ((1.0 + 2.0 * ax + xx) * a + (1.0 - aa) * x) / denom;
}

struct ApplyGenerator {
    const Vec& x;
    Vec operator()(const generator::Orthogonal& g) const { return g.q * x; }
    Vec operator()(const generator::Shift& g) const { return mobius_add(g.a, x); }
    Vec operator()(const generator::SphereInversion& g) const {
        const Vec d = x - g.center;
        return g.center + (g.radius * g.radius / d.squaredNorm()) * d;
    }
};

struct InvertGenerator {
    Generator operator()(const generator::Orthogonal& g) const {
        return generator::Orthogonal{g.q.transpose()};
    }
    Generator operator()(const generator::Shift& g) const { return generator::Shift{-g.a}; }
    Generator operator()(const generator::SphereInversion& g) const { return g; }
};

// Orthonormal basis whose first columns are the given (orthonormal) vectors.
Eigen::MatrixXd complete_basis(const std::vector<Vec>& leading, int n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t k = 0; k < leading.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = leading[k];
    Eigen::MatrixXd basis(n, n);
    int filled = 0;
    for (int k = 0; k < n && filled < n; ++k) {
        Vec v = m.col(k);
        for (int j = 0; j < filled; ++j) v -= basis.col(j).dot(v) * basis.col(j);
        const double len = v.norm();
        if (len < 1e-10) continue;
        basis.col(filled++) = v / len;
    }
    for (int k = 0; filled < n; ++k) {
        Vec v = Vec::Unit(n, k);
        for (int j = 0; j < filled; ++j) v -= basis.col(j).dot(v) * basis.col(j);
        const double len = v.norm();
        if (len < 1e-10) continue;
        basis.col(filled++) = v / len;
    }
    return basis;
}

}  // namespace

double Model::sqrt_c() const { return std::sqrt(c); }

Point::Point(Vec x, Model model) : x_(std::move(x)), model_(model) {
    require(model_.n >= 2, ErrorCode::InvalidParams, "dimension must be at least 2");
    require(model_.c > 0.0 && std::isfinite(model_.c), ErrorCode::InvalidParams,
            "curvature magnitude must be positive");
    require(x_.size() == model_.n, ErrorCode::DimensionMismatch, "coordinate vector length differs from n");
    require(x_.allFinite() && x_.norm() < 1.0, ErrorCode::InvalidParams, "point must satisfy |x| < 1");
}

Point Point::origin(Model model) { return Point(Vec::Zero(model.n), model); }

IdealPoint::IdealPoint(Vec xi) : xi_(std::move(xi)) {
    const double len = xi_.norm();
    if (!(xi_.size() >= 2 && std::isfinite(len) && std::abs(len - 1.0) <= 1e-9)) fail(ErrorCode::InvalidParams, "ideal point must have unit length (got " + std::to_string(len) + ")");
    xi_ /= len;
}

Geodesic::Geodesic(IdealPoint a, IdealPoint b) : from(std::move(a)), to(std::move(b)) {
    require(from.n() == to.n(), ErrorCode::DimensionMismatch, "geodesic endpoints differ in dimension");
    require((from.xi() - to.xi()).norm() > 1e-12, ErrorCode::InvalidParams, "geodesic endpoints must differ");
}

Horosphere::Horosphere(IdealPoint i, Point t) : ideal(std::move(i)), through(std::move(t)) {
    require(ideal.n() == through.n(), ErrorCode::DimensionMismatch, "horosphere ideal point dimension");
}

Vec Isometry::apply(const Vec& x) const {
    Vec y = x;
    for (auto it = generators_.rbegin(); it != generators_.rend(); ++it) y = std::visit(ApplyGenerator{y}, *it);
    return y;
}

Isometry Isometry::inverse() const {
    std::vector<Generator> inv;
    inv.reserve(generators_.size());
    for (auto it = generators_.rbegin(); it != generators_.rend(); ++it) inv.push_back(std::visit(InvertGenerator{}, *it));
    return Isometry(std::move(inv));
}

Isometry Isometry::compose(const Isometry& other) const {
    std::vector<Generator> gens = generators_;
    gens.insert(gens.end(), other.generators_.begin(), other.generators_.end());
    return Isometry(std::move(gens));
}

double hyp_distance(const Point& x, const Point& y) {
    check_same_model(x, y);
    const double diff = (x.x() - y.x()).squaredNorm();
    const double denom = std::sqrt(diff + one_minus_sq(x.x()) * one_minus_sq(y.x()));
    return 2.0 * std::atanh(std::sqrt(diff) / denom) / x.model().sqrt_c();
}

double dist_to_geodesic(const Point& x, const Geodesic& g) {
    check_dim(x, g.from.n());
    // Move x to the origin; the image geodesic then has distance artanh(|η1 + η2| / 2).
    const Vec minus_x = -x.x();
    Vec e1 = mobius_add(minus_x, g.from.xi());
    Vec e2 = mobius_add(minus_x, g.to.xi());
    e1.normalize();
    e2.normalize();
    const double half = std::min(1.0, 0.5 * (e1 + e2).norm());
    return std::atanh(half) / x.model().sqrt_c();
}

double signed_distance(const Point& x, const Hyperplane& plane) {
    check_dim(x, plane.center.n());
    const double sc = x.model().sqrt_c();
    const double tau = sc * plane.offset;
    const double w = one_minus_sq(x.x());
    const double x0 = (1.0 + x.x().squaredNorm()) / w;
    const double xs = 2.0 * x.x().dot(plane.center.xi()) / w;
    return std::asinh(-x0 * std::sinh(tau) + std::cosh(tau) * xs) / sc;
}

double busemann(const Point& x, const Horosphere& h) {
    check_same_model(x, h.through);
    const Vec& xi = h.ideal.xi();
    auto level = [&](const Vec& y) { return std::log(one_minus_sq(y) / (y - xi).squaredNorm()); };
    return (level(x.x()) - level(h.through.x())) / x.model().sqrt_c();
}

Isometry mobius_fix_ideal(const IdealPoint& xi, double translation, const Model& model) {
    require(std::isfinite(translation), ErrorCode::InvalidParams, "translation must be finite");
    return Isometry({generator::Shift{std::tanh(0.5 * model.sqrt_c() * translation) * xi.xi()}});
}

Isometry parabolic_fix_ideal(const IdealPoint& xi, const Vec& w) {
    require(w.size() == xi.n(), ErrorCode::DimensionMismatch, "parabolic displacement dimension");
    const double len = w.norm();
    if (len == 0.0) return Isometry::identity();
    require(std::abs(w.dot(xi.xi())) <= 1e-12 * len, ErrorCode::InvalidParams,
            "parabolic displacement must be orthogonal to the fixed ideal point");
    // Two inversions in spheres orthogonal to the boundary and tangent at xi.
    // Inverting at xi turns them into parallel planes at distances 1 and
    // 1 + |w|/2, so the composition is a horizontal translation by |w| there.
    const Vec dir = w / len;
    const double r1 = 0.5, r2 = 1.0 / (2.0 + len);
    return Isometry({generator::SphereInversion{xi.xi() + r2 * dir, r2},
                     generator::SphereInversion{xi.xi() + r1 * dir, r1}});
}

Point apply_isometry(const Isometry& t, const Point& x) {
    Vec y = t.apply(x.x());
    // Guard the open-ball invariant against roundoff for points hugging the boundary.
    const double r = y.norm();
    if (r >= 1.0) y *= std::nextafter(1.0, 0.0) / r;
    return Point(std::move(y), x.model());
}

IdealPoint apply_isometry(const Isometry& t, const IdealPoint& xi) {
    Vec y = t.apply(xi.xi());
    return IdealPoint(y / y.norm());
}

Geodesic apply_isometry(const Isometry& t, const Geodesic& g) {
    return Geodesic(apply_isometry(t, g.from), apply_isometry(t, g.to));
}

Horosphere apply_isometry(const Isometry& t, const Horosphere& h) {
    return Horosphere(apply_isometry(t, h.ideal), apply_isometry(t, h.through));
}

double laplacian_distance(double r, double c, int n, DistanceMode mode) {
    require(c > 0.0 && n >= 2, ErrorCode::InvalidParams, "laplacian_distance: need c > 0 and n >= 2");
    const double sc = std::sqrt(c);
    if (mode == DistanceMode::Horosphere) return -(n - 1) * sc;
    require(r > 0.0, ErrorCode::NonpositiveRadius, "laplacian_distance: sphere mode needs r > 0");
    return (n - 1) * sc / std::tanh(sc * r);
}

Point point_along(const IdealPoint& direction, double t, const Model& model) {
    require(direction.n() == model.n, ErrorCode::DimensionMismatch, "direction dimension");
    return Point(std::tanh(0.5 * model.sqrt_c() * t) * direction.xi(), model);
}

Isometry geodesic_frame(const Geodesic& g, const Model& model) {
    const int n = g.from.n();
    require(n == model.n, ErrorCode::DimensionMismatch, "geodesic dimension differs from model");
    const Vec sum = g.from.xi() + g.to.xi();
    const Vec v = (g.to.xi() - g.from.xi()).normalized();
    const double half = 0.5 * sum.norm();
    Vec u;
    if (half < 1e-14 && n == 2) {
        u = Vec(2);
        u << -v(1), v(0);  // same side as hyperplane_of
    } else if (half < 1e-14) {
        u = complete_basis({v}, n).col(1);
    } else {
        u = sum / sum.norm();
    }
    const Eigen::MatrixXd q = complete_basis({v, u}, n);
    const double t0 = std::atanh(std::min(half, 1.0));  // unit-curvature distance origin -> geodesic
    std::vector<Generator> gens;
    if (half >= 1e-14) gens.push_back(generator::Shift{std::tanh(0.5 * t0) * u});
    gens.push_back(generator::Orthogonal{q});
    return Isometry(std::move(gens));
}

Point geodesic_point(const Geodesic& g, double t, const Model& model) {
    const Isometry frame = geodesic_frame(g, model);
    return apply_isometry(frame, point_along(IdealPoint(Vec::Unit(model.n, 0)), t, model));
}

Hyperplane hyperplane_of(const Geodesic& g, const Model& model) {
    require(model.n == 2 && g.from.n() == 2, ErrorCode::DimensionMismatch,
            "only in H² is a geodesic a hyperplane");
    const Vec sum = g.from.xi() + g.to.xi();
    const double half = 0.5 * sum.norm();
    if (half < 1e-14) {
        const Vec v = (g.to.xi() - g.from.xi()).normalized();
        Vec u(2);
        u << -v(1), v(0);
        return Hyperplane{IdealPoint(u), 0.0};
    }
    return Hyperplane{IdealPoint(sum / sum.norm()), std::atanh(std::min(half, 1.0)) / model.sqrt_c()};
}

Isometry random_isometry(std::mt19937_64& rng, int n, double max_shift) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const Eigen::MatrixXd q = qr.householderQ();

    Vec dir(n);
    for (int i = 0; i < n; ++i) dir(i) = normal(rng);
    const Vec a = (max_shift * uniform(rng)) * dir.normalized();

    Vec xi(n);
    for (int i = 0; i < n; ++i) xi(i) = normal(rng);
    xi.normalize();
    Vec w(n);
    for (int i = 0; i < n; ++i) w(i) = normal(rng);
    w -= w.dot(xi) * xi;
    w *= uniform(rng) / w.norm();

    return Isometry({generator::Orthogonal{q}, generator::Shift{a}})
        .compose(parabolic_fix_ideal(IdealPoint(xi), w));
}

double conformal_factor(const Vec& x, const Model& model) {
    return 2.0 / (model.sqrt_c() * one_minus_sq(x));
}

double fd_metric_laplacian(const std::function<double(const Vec&)>& f, const Vec& x, double h,
                           const Model& model) {
    const int n = model.n;
    const double f0 = f(x);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e(i) = h;
        const double wp = std::pow(conformal_factor(x + 0.5 * e, model), n - 2);
        const double wm = std::pow(conformal_factor(x - 0.5 * e, model), n - 2);
        sum += wp * (f(x + e) - f0) - wm * (f0 - f(x - e));
    }
    return sum / (h * h * std::pow(conformal_factor(x, model), n));
}

double fd_metric_gradient_norm(const std::function<double(const Vec&)>& f, const Vec& x, double h,
                               const Model& model) {
    const int n = model.n;
    Vec grad(n);
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e(i) = h;
        grad(i) = (f(x + e) - f(x - e)) / (2.0 * h);
    }
    return grad.norm() / conformal_factor(x, model);
}

}  // namespace asymlab
