#include "asymlab/sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "asymlab/error.hpp"

namespace asymlab {
namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::uint64_t i, int base) {
    double result = 0.0, f = 1.0 / base;
    while (i > 0) {
        result += f * static_cast<double>(i % base);
        i /= base;
        f /= base;
    }
    return result;
}

// Unit vector in R^n from n-1 uniform coordinates (Box–Muller pairs, then normalise).
Vec direction_from(const std::vector<double>& u, std::size_t offset, int n) {
    if (n == 2) {
        const double th = 2.0 * std::numbers::pi * u[offset];
        Vec v(2);
        v << std::cos(th), std::sin(th);
        return v;
    }
    Vec v(n);
    for (int k = 0; k < n; k += 2) {
        const double a = std::max(u[offset + k], 1e-300);
        const double b = (k + 1 < n) ? u[offset + k + 1] : 0.25;
        const double rad = std::sqrt(-2.0 * std::log(a));
        v(k) = rad * std::cos(2.0 * std::numbers::pi * b);
        if (k + 1 < n) v(k + 1) = rad * std::sin(2.0 * std::numbers::pi * b);
    }
    return v.normalized();
}

}  // namespace

std::vector<std::vector<double>> halton(int count, int dim, std::uint64_t seed) {
    require(count >= 0, ErrorCode::InvalidParams, "halton: negative count");
    require(dim >= 1 && dim <= static_cast<int>(std::size(kPrimes)), ErrorCode::InvalidParams,
            "halton: dimension must be in [1, 12]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform;
    std::vector<double> shift(static_cast<std::size_t>(dim));
    for (auto& s : shift) s = uniform(rng);
    std::vector<std::vector<double>> pts(static_cast<std::size_t>(count), std::vector<double>(dim));
    for (int i = 0; i < count; ++i) {
        for (int k = 0; k < dim; ++k) {
            double v = radical_inverse(static_cast<std::uint64_t>(i) + 1, kPrimes[k]) + shift[k];
            pts[i][k] = v - std::floor(v);
        }
    }
    return pts;
}

std::vector<Point> sample_tube(const Geodesic& g, const Model& model, int count, double t_max, double d_min,
                               double d_max, std::uint64_t seed) {
    require(model.n == 2, ErrorCode::DimensionMismatch, "tube sampler works in H²");
    require(0.0 < d_min && d_min < d_max && t_max >= 0.0, ErrorCode::InvalidParams, "bad tube bounds");
    const Isometry frame = geodesic_frame(g, model);
    const double sc = model.sqrt_c();
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(count));
    for (const auto& u : halton(count, 2, seed)) {
        const double t = -t_max + 2.0 * t_max * u[0];
        const double d = d_min + (d_max - d_min) * u[1];
        Vec e1 = Vec::Zero(2), off = Vec::Zero(2);
        e1(0) = std::tanh(0.5 * sc * t);
        off(1) = std::tanh(0.5 * sc * d);
        const Isometry along({generator::Shift{e1}});
        out.push_back(apply_isometry(frame.compose(along), Point(off, model)));
    }
    return out;
}

std::vector<Point> sample_annulus(const Point& center, int count, double r_min, double r_max, std::uint64_t seed) {
    require(0.0 <= r_min && r_min < r_max, ErrorCode::InvalidParams, "bad annulus bounds");
    const Model& model = center.model();
    const int n = model.n;
    const double sc = model.sqrt_c();
    const Isometry to_center({generator::Shift{center.x()}});
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(count));
    for (const auto& u : halton(count, n, seed)) {
        const double r = r_min + (r_max - r_min) * u[0];
        const Vec dir = direction_from(u, 1, n);
        out.push_back(apply_isometry(to_center, Point(std::tanh(0.5 * sc * r) * dir, model)));
    }
    return out;
}

std::vector<Point> sample_horoball(const Horosphere& h, int count, double b_min, double b_max, double spread,
                                   std::uint64_t seed) {
    require(b_min < b_max && spread >= 0.0, ErrorCode::InvalidParams, "bad horoball bounds");
    const Model& model = h.through.model();
    const int n = model.n;
    const Point origin = Point::origin(model);
    // Busemann value of the origin relative to h.
    const double b_origin = busemann(origin, h);
    const Vec& xi = h.ideal.xi();
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(count));
    for (const auto& u : halton(count, n + 1, seed)) {
        const double b = b_min + (b_max - b_min) * u[0];
        Point axis = point_along(h.ideal, b - b_origin, model);
        Vec w = direction_from(u, 1, n);
        w -= w.dot(xi) * xi;
        const double len = w.norm();
        if (len > 1e-12) w *= spread * u[n] / len;
        else w.setZero();
        out.push_back(apply_isometry(parabolic_fix_ideal(h.ideal, w), axis));
    }
    return out;
}

}  // namespace asymlab
