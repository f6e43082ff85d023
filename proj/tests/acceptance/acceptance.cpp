// Acceptance driver: one PASS/FAIL line per criterion. With an argument k only
// criterion k runs; the exit status is 0 exactly when every selected criterion passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "asymlab/barrier_profiles.hpp"
#include "asymlab/elliptic_solver.hpp"
#include "asymlab/field_synthesis.hpp"
#include "asymlab/hyperbolic_geometry.hpp"
#include "asymlab/operator_family.hpp"
#include "asymlab/sampling.hpp"

using namespace asymlab;

namespace {

constexpr double kQuadTol = 1e-10;

// Collects the sub-checks of one criterion.
struct Verdict {
    bool ok = true;
    std::ostringstream detail;

    void check(bool passed, const std::string& what) {
        ok = ok && passed;
        if (detail.tellp() > 0) detail << "; ";
        detail << what << (passed ? "" : " [FAILED]");
    }
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

Vec unit2(double theta) {
    Vec v(2);
    v << std::cos(theta), std::sin(theta);
    return v;
}

Vec random_point(std::mt19937_64& rng, int n, double max_norm) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v.normalized() * (max_norm * std::pow(u(rng), 1.0 / n));
}

IdealPoint random_ideal(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return IdealPoint(v.normalized());
}

void classification(Verdict& v) {
    const ClassificationResult mg = classify(make_minimal_graph(), kQuadTol);
    v.check(mg.cls == OperatorClass::RemovableType, "minimalGraph " + std::string(to_string(mg.cls)));
    v.check(mg.divergence_exponent >= 0.9 && mg.divergence_exponent <= 1.1,
            "minimalGraph exponent " + fmt(mg.divergence_exponent) + " in [0.9, 1.1]");
    for (double p : {1.5, 2.0, 3.0, 5.0}) {
        const ClassificationResult r = classify(make_p_laplacian(p), kQuadTol);
        v.check(r.cls == OperatorClass::SingularType, "p=" + fmt(p) + " " + std::string(to_string(r.cls)));
    }
}

void scherk(Verdict& v) {
    const Profile g = scherk_profile(make_minimal_graph(), 0.0, 1.0, 2, kQuadTol);
    double err = 0.0;
    for (double d : {0.01, 0.1, 1.0, 5.0}) err = std::max(err, std::abs(g(d) - std::log(1.0 / std::tanh(d / 2.0))));
    v.check(err <= 1e-8, "closed-form error " + fmt(err) + " <= 1e-08");
    const double ratio = (g(1e-3) - g(2e-3)) / std::log(2.0);
    v.check(std::abs(ratio - 1.0) <= 0.01, "blow-up (g(d)-g(2d))/ln2 = " + fmt(ratio));
}

void singular(Verdict& v) {
    // Nodes at 1e-2 spacing over [-10, 3].
    const std::pair<double, double> range{-10.0, 3.0};
    for (double p : {1.5, 2.0, 3.0, 5.0})
        for (int n : {2, 3}) {
            const OperatorSpec op = make_p_laplacian(p);
            const Profile g0 = singular_profile(op, n, range, kQuadTol, 1.0, 1301);
            double err = 0.0;
            for (int k = 0; k <= 1300; ++k) {
                const double d = -10.0 + 0.01 * k;
                err = std::max(err, std::abs(g0(d) - (p - 1.0) / (n - 1) * std::exp((n - 1) * d / (p - 1.0))));
            }
            const double res = ode_residual(g0, op, [n](double) { return -(n - 1.0); });
            const std::string tag = "p=" + fmt(p) + " n=" + std::to_string(n);
            v.check(err <= 1e-8, tag + " error " + fmt(err));
            v.check(res <= 1e-6, tag + " ode residual " + fmt(res));
        }
}

void annulus(Verdict& v) {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int held = 0;
    for (int k = 0; k < 20; ++k) {
        const OperatorSpec op = k % 2 ? make_minimal_graph() : make_p_laplacian(1.2 + 4.0 * u(rng));
        const int n = 2 + (k / 2) % 2;
        const double delta = -1.0 + 2.0 * u(rng);
        const double K = delta + 0.1 + 4.0 * u(rng);
        const double rho = 0.2 + 3.0 * u(rng);
        const double b = 0.5 + 1.5 * u(rng);
        const AnnulusBarrier ab = annulus_profile(op, delta, b, n, rho, K, kQuadTol);
        held += ab.spec.chain_holds();
    }
    v.check(held == 20, std::to_string(held) + "/20 draws with delta < h1 < h0 < K/2 + delta/2");
    const OperatorSpec p2 = make_p_laplacian(2.0);
    double err = 0.0;
    for (double b : {0.5, 1.0, 2.0}) {
        const double delta = 0.2, rho = 1.5, K = 3.0;
        const AnnulusBarrier ab = annulus_profile(p2, delta, b, 2, rho, K, kQuadTol);
        const double alpha = ab.spec.alpha;
        for (double r = 1.0; r <= 2 * rho + 1.0; r += 0.05) {
            const double f = std::sinh(b * alpha) / b * std::log(std::tanh(b * r / 2) / std::tanh(b / 2));
            err = std::max(err, std::abs(annulus_value(p2, alpha, b, 2, r, kQuadTol) - f));
            err = std::max(err, std::abs(ab.profile(r) - delta - f));
        }
    }
    v.check(err <= 1e-8, "pLaplacian(2) closed form vs quadrature " + fmt(err));
}

void supersolutions(Verdict& v) {
    const OperatorSpec mg = make_minimal_graph();
    const Model m{2, 1.0};
    const double hs[] = {1e-2, 5e-3, 2.5e-3};

    const Geodesic g(IdealPoint(Vec::Unit(2, 1)), IdealPoint(-Vec::Unit(2, 1)));
    const ScalarField sf(scherk_profile(mg, 0.0, 1.0, 2, kQuadTol), distance::ToHyperplane{hyperplane_of(g, m)}, m);
    const auto tube = sample_tube(g, m, 200, 1.5, 0.1, 2.0, 42);
    int sv = 0;
    for (double h : hs) sv += supersolution_check(sf, mg, tube, h, 1e-6).sign_violations;
    v.check(sv == 0, "Scherk violations " + std::to_string(sv));

    const AnnulusBarrier ab = annulus_profile(mg, 0.0, 1.0, 2, 1.0, 2.0, kQuadTol);
    const ScalarField af(ab.profile, distance::ToPoint{Point::origin(m)}, m);
    const auto ring = sample_annulus(Point::origin(m), 200, 1.2, 2.8, 7);
    int av = 0;
    for (double h : hs) av += supersolution_check(af, mg, ring, h, 1e-6).sign_violations;
    v.check(av == 0, "annulus violations " + std::to_string(av));

    const OperatorSpec p2 = make_p_laplacian(2.0);
    const Horosphere hz(IdealPoint(Vec::Unit(2, 0)), Point::origin(m));
    const ScalarField g0(singular_profile(p2, 2, {-8.0, 4.0}, 1e-12, 1.0, 2000), distance::Horospherical{hz}, m);
    const auto ball = sample_horoball(hz, 200, -1.5, 1.0, 0.5, 3);
    std::vector<double> sup;
    for (double h : {2e-2, 1e-2, 5e-3}) {
        const ResidualReport rep = supersolution_check(g0, p2, ball, h, 1e-6);
        sup.push_back(rep.max_abs);
    }
    const double order = std::min(std::log2(sup[0] / sup[1]), std::log2(sup[1] / sup[2]));
    v.check(order >= 1.9, "g0 residual order " + fmt(order));
}

void solver(Verdict& v) {
    // Annulus oracle: harmonic spherical solution in H².
    const OperatorSpec p2 = make_p_laplacian(2.0);
    RadialGrid rg;
    rg.r0 = 1.0;
    rg.r1 = 3.0;
    rg.nodes = 512;
    const auto lt = [](double r) { return std::log(std::tanh(r / 2.0)); };
    const RadialSolution sph = solve_radial_bvp(p2, 2, 1.0, rg, 0.0, std::sinh(1.0) * (lt(3.0) - lt(1.0)));
    double e1 = 0.0;
    for (std::size_t k = 0; k < sph.nodes.size(); ++k)
        e1 = std::max(e1, std::abs(sph.values[k] - std::sinh(1.0) * (lt(sph.nodes[k]) - lt(1.0))));
    v.check(sph.converged && e1 <= 1e-6, "radial annulus oracle " + fmt(e1));

    // Singular-solution oracle along horospherical coordinates.
    double e2 = 0.0;
    for (double p : {1.5, 2.0, 3.0})
        for (int n : {2, 3}) {
            RadialGrid hg;
            hg.r0 = -3.0;
            hg.r1 = 1.0;
            hg.nodes = 512;
            hg.coordinates = RadialCoordinates::Horospherical;
            const auto g0 = [&](double d) { return (p - 1.0) / (n - 1) * std::exp((n - 1) * d / (p - 1.0)); };
            const RadialSolution sol = solve_radial_bvp(make_p_laplacian(p), n, 1.0, hg, g0(hg.r0), g0(hg.r1));
            if (!sol.converged) e2 = kInfinity;
            for (std::size_t k = 0; k < sol.nodes.size(); ++k) e2 = std::max(e2, std::abs(sol.values[k] - g0(sol.nodes[k])));
        }
    v.check(e2 <= 1e-6, "radial singular oracle " + fmt(e2));

    const Model m{2, 1.0};
    const IdealPoint xi(Vec::Unit(2, 0));
    const Horosphere h(xi, point_along(xi, 4.0, m));
    const ScalarField g0(singular_profile(p2, 2, {-14.0, 4.0}, kQuadTol), distance::Horospherical{h}, m);
    DiskGrid g;
    g.r_trunc = 4.0;
    g.nr = 96;
    g.ntheta = 128;
    g.puncture = xi;
    g.clustering = defaults::angular_clustering;
    const SolverResult res = solve_disk(p2, g, [&](double th) { return g0(point_along(IdealPoint(unit2(th)), 4.0, m)); });
    double e3 = 0.0;
    for (int i = 0; i <= g.nr; ++i)
        for (int j = 0; j < g.ntheta; ++j) {
            e3 = std::max(e3, std::abs(res.values[g.index(i, j)] - g0(g.node(i, j))));
            if (i == 0) break;
        }
    v.check(res.converged && e3 <= 5e-4, "disk g0 oracle " + fmt(e3));
}

void dichotomy(Verdict& v) {
    ProbeGrid gp;
    const IdealPoint p1(Vec::Unit(2, 0));
    const std::vector<double> rs{3, 4, 5, 6};
    const ProbeReport mg = removability_probe(make_minimal_graph(), p1, 1.0, rs, gp, std::nullopt, true);
    std::string sups;
    bool monotone = true;
    for (std::size_t k = 0; k < mg.entries.size(); ++k) {
        sups += (k ? "," : "") + fmt(mg.entries[k].sup);
        if (k && mg.entries[k].sup > mg.entries[k - 1].sup + 1e-9) monotone = false;
    }
    v.check(monotone, "minimalGraph sups " + sups + " non-increasing");
    v.check(std::abs(mg.last_increment()) <= 2e-2, "minimalGraph last increment " + fmt(mg.last_increment()) + " <= 0.02");

    const OperatorSpec p2 = make_p_laplacian(2.0);
    const Model m{2, 1.0};
    const Horosphere h(p1, point_along(p1, rs.back(), m));
    const ScalarField trace(singular_profile(p2, 2, {-2.0 * rs.back() - 4.0, rs.back()}, kQuadTol), distance::Horospherical{h}, m);
    const ProbeReport pl = removability_probe(p2, p1, 1.0, rs, gp, trace, true);
    double dev = 0.0;
    bool converged = true;
    for (const auto& e : pl.entries) {
        dev = std::max(dev, std::abs(e.sup - e.reference_sup));
        converged = converged && e.converged;
    }
    v.check(converged && dev <= 5e-3, "pLaplacian(2) trace tracking deviation " + fmt(dev) + " <= 0.005");
}

void geometry(Verdict& v) {
    std::mt19937_64 rng(1000);
    double wd = 0.0, wb = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const int n = 2 + k % 3;
        const Model m{n, 1.0};
        const Isometry t = random_isometry(rng, n);
        const Point x(random_point(rng, n, 0.9), m), y(random_point(rng, n, 0.9), m);
        const Horosphere h(random_ideal(rng, n), Point(random_point(rng, n, 0.5), m));
        wd = std::max(wd, std::abs(hyp_distance(apply_isometry(t, x), apply_isometry(t, y)) - hyp_distance(x, y)));
        wb = std::max(wb, std::abs(busemann(apply_isometry(t, x), apply_isometry(t, h)) - busemann(x, h)));
    }
    v.check(wd <= 1e-9, "distance invariance " + fmt(wd));
    v.check(wb <= 1e-9, "Busemann invariance " + fmt(wb));
    double order = kInfinity;
    for (int n : {2, 3})
        for (double c : {1.0, 2.0}) {
            const Model m{n, c};
            const Horosphere h(IdealPoint(Vec::Unit(n, 0)), Point::origin(m));
            Vec x = Vec::Zero(n);
            x[0] = 0.3;
            x[n - 1] += 0.2;
            const auto f = [&](const Vec& z) { return busemann(Point(z, m), h); };
            const double exact = -(n - 1) * std::sqrt(c);
            const double e1 = std::abs(fd_metric_laplacian(f, x, 1e-2, m) - exact);
            const double e2 = std::abs(fd_metric_laplacian(f, x, 5e-3, m) - exact);
            order = std::min(order, std::log2(e1 / e2));
        }
    v.check(order >= 1.9, "FD Laplacian of Busemann order " + fmt(order));
}

struct Criterion {
    const char* title;
    double budget_s;
    void (*body)(Verdict&);
};

const Criterion kCriteria[] = {
    {"classification dichotomy", 5, classification},
    {"Scherk closed form", 5, scherk},
    {"singular solution", 5, singular},
    {"annulus barrier constants", 10, annulus},
    {"supersolution sign", 60, supersolutions},
    {"solver vs oracle", 300, solver},
    {"dichotomy probe", 600, dichotomy},
    {"geometry kernel", 30, geometry},
};

bool run(int k) {
    const Criterion& c = kCriteria[k - 1];
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        c.body(v);
    } catch (const std::exception& e) {
        v.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.check(secs < c.budget_s, "runtime " + fmt(secs) + " s < " + fmt(c.budget_s) + " s");
    std::printf("%s criterion %d (%s): %s\n", v.ok ? "PASS" : "FAIL", k, c.title, v.detail.str().c_str());
    std::fflush(stdout);
    return v.ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    if (argc > 1) {
        const int k = std::atoi(argv[1]);
        if (k < 1 || k > 8) {
            std::fprintf(stderr, "usage: acceptance [1-8]\n");
            return 1;
        }
        selected.push_back(k);
    } else {
        for (int k = 1; k <= 8; ++k) selected.push_back(k);
    }
    bool all = true;
    for (int k : selected) all = run(k) && all;
    return all ? 0 : 1;
}
