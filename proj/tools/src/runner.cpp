#include "asymlab_cli/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <future>
#include <numbers>

#include "asymlab/barrier_profiles.hpp"
#include "asymlab/elliptic_solver.hpp"
#include "asymlab/field_synthesis.hpp"
#include "asymlab/sampling.hpp"

namespace asymlab::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

class Context {
public:
    Context(const ExperimentConfig& cfg, const RunConfig& run, fs::path root, std::uint64_t seed, bool parallel)
        : cfg(cfg), run(run), root(std::move(root)), seed(seed), parallel(parallel) {
        result.name = run.name;
        result.kind = run.kind;
    }

    const ExperimentConfig& cfg;
    const RunConfig& run;
    fs::path root;
    std::uint64_t seed;
    bool parallel;
    RunResult result;

    Model model() const { return {cfg.geometry.n, cfg.geometry.c}; }
    double quad_tol() const { return cfg.numerics.quad_tol; }

    OperatorSpec op(const std::string& name) const { return build_operator(*cfg.find_operator(name)); }

    IdealPoint ideal(const std::string& name) const {
        const auto& xi = cfg.geometry.ideal_points.at(name);
        return IdealPoint(Eigen::Map<const Vec>(xi.data(), static_cast<Eigen::Index>(xi.size())));
    }
    Geodesic geodesic(const std::string& name) const {
        const auto& g = cfg.geometry.geodesics.at(name);
        return Geodesic{ideal(g.from), ideal(g.to)};
    }
    Horosphere horosphere(const std::string& name) const {
        const auto& h = cfg.geometry.horospheres.at(name);
        const IdealPoint xi = ideal(h.ideal);
        return Horosphere(xi, point_along(xi, h.t, model()));
    }

    void write(const std::string& file, const std::string& text) {
        const fs::path rel = fs::path(run.name) / file;
        io::write_file(root / rel, text);
        result.files.push_back(rel.generic_string());
    }

    void check_le(const std::string& name, double value, double tol) {
        result.assertions.push_back({name, value, tol, "<=", "", "", value <= tol});
    }
    void check_ge(const std::string& name, double value, double tol) {
        result.assertions.push_back({name, value, tol, ">=", "", "", value >= tol});
    }
    void check_eq(const std::string& name, const std::string& expected, const std::string& actual) {
        result.assertions.push_back({name, std::nullopt, std::nullopt, "==", expected, actual, expected == actual});
    }
    void check_true(const std::string& name, bool ok) { check_eq(name, "true", ok ? "true" : "false"); }
};

std::string tabulate(const Profile& p, double lo, double hi, double step) {
    std::string out = "r,value\n";
    const long k0 = std::lround(std::ceil(lo / step - 1e-9)), k1 = std::lround(std::floor(hi / step + 1e-9));
    for (long k = k0; k <= k1; ++k) {
        const double x = k * step;
        if (!p.contains(x)) continue;
        out += io::format_number(x) + "," + io::format_number(p(x)) + "\n";
    }
    return out;
}

// Nodes resolving a singular profile well enough for fourth-order residuals.
int singular_nodes(const Context& ctx, std::pair<double, double> range) {
    const double spacing = 1e-2;
    return std::max(ctx.cfg.numerics.profile_nodes, static_cast<int>(std::ceil((range.second - range.first) / spacing)) + 1);
}

// g0 tabulated so that it covers Busemann values on a disk of radius R.
Profile trace_profile(const Context& ctx, const OperatorSpec& spec, const Horosphere& h, double R) {
    const double b0 = busemann(Point::origin(ctx.model()), h);
    const double sc = ctx.model().sqrt_c();
    const std::pair<double, double> range{b0 - R - 2.0 / sc, b0 + R + 1.0 / sc};
    return singular_profile(spec, ctx.model().n, range, ctx.quad_tol(), ctx.model().c, singular_nodes(ctx, range));
}

// ---------------------------------------------------------------------------

void run_classify(Context& ctx) {
    const auto names = ctx.run.texts("operators");
    const auto expect = ctx.run.has("expect") ? ctx.run.texts("expect") : std::vector<std::string>{};
    Json rows = Json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const OperatorSpec spec = ctx.op(names[i]);
        const ValidationReport v = validate_structure(spec, defaults::validation_samples);
        const ClassificationResult c = classify(spec, ctx.quad_tol());
        Json row;
        row["operator"] = names[i];
        row["name"] = spec.name;
        row["class"] = std::string(to_string(c.cls));
        row["k0"] = num(c.k0);
        row["divergence_exponent"] = num(c.divergence_exponent);
        row["structure_valid"] = v.passed();
        rows.push_back(std::move(row));
        ctx.check_true("structure:" + names[i], v.passed());
        if (!expect.empty()) ctx.check_eq("class:" + names[i], expect[i], std::string(to_string(c.cls)));
        std::string csv = "cutoff,value\n";
        for (const auto& [cut, val] : c.partial_integrals)
            csv += io::format_number(cut) + "," + io::format_number(val) + "\n";
        ctx.write(names[i] + "_partials.csv", csv);
    }
    ctx.result.summary["operators"] = std::move(rows);
}

void run_barriers(Context& ctx) {
    const OperatorSpec spec = ctx.op(ctx.run.text("operator"));
    const std::string kind = ctx.run.text("barrier");
    const Model m = ctx.model();
    const double sc = m.sqrt_c(), dim = m.n - 1;
    const double rtol = ctx.cfg.numerics.residual_tol;
    auto& sum = ctx.result.summary;
    sum["barrier"] = kind;
    sum["operator"] = spec.name;
    std::optional<Profile> profile;
    std::vector<double> table;
    if (kind == "scherk") {
        ScherkOptions opts;
        opts.d_min = ctx.run.number("d_min");
        opts.nodes = ctx.cfg.numerics.profile_nodes;
        profile = scherk_profile(spec, ctx.run.number("delta"), m.c, m.n, ctx.quad_tol(), opts);
        table = {0.01, 5.0, 0.01};
        const double r = ode_residual(*profile, spec, [&](double d) { return dim * sc * std::tanh(sc * d); });
        sum["ode_residual"] = r;
        sum["delta"] = ctx.run.number("delta");
        ctx.check_le("ode_residual", r, rtol);
    } else if (kind == "annulus") {
        const double rho = ctx.run.number("rho");
        AnnulusOptions opts;
        opts.nodes = ctx.cfg.numerics.profile_nodes;
        const AnnulusBarrier a = annulus_profile(spec, ctx.run.number("delta"), ctx.run.number("b"), m.n, rho,
                                                 ctx.run.number("K"), ctx.quad_tol(), opts);
        profile = a.profile;
        table = {1.0, 2.0 * rho + 1.0, 0.01};
        sum["alpha"] = a.spec.alpha;
        sum["h0"] = a.spec.h0;
        sum["h1"] = a.spec.h1;
        sum["delta"] = a.spec.delta;
        sum["K"] = a.spec.K;
        sum["b"] = a.spec.b;
        sum["rho"] = a.spec.rho;
        ctx.check_true("chain:delta<h1<h0<K/2+delta/2", a.spec.chain_holds());
    } else {
        const auto range = ctx.run.numbers("range");
        const std::pair<double, double> r{range[0], range[1]};
        profile = singular_profile(spec, m.n, r, ctx.quad_tol(), m.c, singular_nodes(ctx, r));
        table = {std::max(-10.0, r.first), std::min(3.0, r.second), 0.01};
        const double res = ode_residual(*profile, spec, [&](double) { return -dim * sc; });
        sum["ode_residual"] = res;
        ctx.check_le("ode_residual", res, rtol);
    }
    if (ctx.run.has("table")) table = ctx.run.numbers("table");
    sum["nodes"] = profile->size();
    sum["warnings"] = profile->warnings();
    ctx.write("profile.csv", io::profile_csv(*profile));
    ctx.write("profile.json", io::dump(io::profile_json(*profile)));
    ctx.write("table.csv", tabulate(*profile, table[0], table[1], table[2]));
}

void run_residuals(Context& ctx) {
    const OperatorSpec spec = ctx.op(ctx.run.text("operator"));
    const std::string kind = ctx.run.text("barrier");
    std::string expect = ctx.run.text("expect");
    if (expect == "auto") expect = kind == "singular" ? "solution" : "supersolution";
    const Model m = ctx.model();
    const int count = ctx.run.integer("samples");
    const double h = ctx.run.number("h");
    const int levels = ctx.run.integer("levels");
    const double tol = ctx.cfg.numerics.residual_tol;

    std::optional<ScalarField> field;
    std::vector<Point> samples;
    if (kind == "scherk") {
        const Geodesic g = ctx.geodesic(ctx.run.text("geodesic"));
        const auto band = ctx.run.has("band") ? ctx.run.numbers("band") : std::vector<double>{0.1, 2.0};
        Profile p = scherk_profile(spec, ctx.run.number("delta"), m.c, m.n, ctx.quad_tol());
        field.emplace(std::move(p), distance::ToHyperplane{hyperplane_of(g, m)}, m);
        samples = sample_tube(g, m, count, 1.5, band[0], band[1], ctx.seed);
    } else if (kind == "annulus") {
        const double rho = ctx.run.number("rho");
        const auto band =
            ctx.run.has("band") ? ctx.run.numbers("band") : std::vector<double>{1.2, 2.0 * rho + 0.8};
        AnnulusBarrier a = annulus_profile(spec, ctx.run.number("delta"), ctx.run.number("b"), m.n, rho,
                                           ctx.run.number("K"), ctx.quad_tol());
        field.emplace(std::move(a.profile), distance::ToPoint{Point::origin(m)}, m);
        samples = sample_annulus(Point::origin(m), count, band[0], band[1], ctx.seed);
    } else {
        const Horosphere hs = ctx.horosphere(ctx.run.text("horosphere"));
        const auto band = ctx.run.has("band") ? ctx.run.numbers("band") : std::vector<double>{-3.0, 2.0};
        const std::pair<double, double> range{band[0] - 4.0, band[1] + 2.0};
        Profile p = singular_profile(spec, m.n, range, ctx.quad_tol(), m.c, singular_nodes(ctx, range));
        field.emplace(std::move(p), distance::Horospherical{hs}, m);
        samples = sample_horoball(hs, count, band[0], band[1], 0.5, ctx.seed);
    }

    SupersolutionOptions opts;
    opts.allowance_factor = ctx.cfg.numerics.allowance_factor;
    opts.seed = ctx.seed;
    Json lv = Json::array();
    std::vector<double> max_abs;
    for (int k = 0; k < levels; ++k) {
        const double hk = h * std::ldexp(1.0, -k);
        const ResidualReport rep = supersolution_check(*field, spec, samples, hk, tol, opts);
        Json row = io::residual_json(rep);
        int violations = rep.sign_violations;
        if (expect == "solution") {
            // Q(-u) = -Q(u): violations of the negated field are those below -threshold.
            violations += static_cast<int>(std::count_if(rep.residuals.begin(), rep.residuals.end(),
                                                         [&](double r) { return -r > rep.threshold(); }));
            row["two_sided_violations"] = violations;
        }
        lv.push_back(std::move(row));
        max_abs.push_back(rep.max_abs);
        char label[48];
        std::snprintf(label, sizeof label, "violations:h=%g", hk);
        ctx.check_le(label, violations, 0.0);
        ctx.write("residuals_level" + std::to_string(k) + ".csv", io::residual_csv(rep));
    }
    ctx.result.summary["expect"] = expect;
    ctx.result.summary["barrier"] = kind;
    ctx.result.summary["seed"] = ctx.seed;
    ctx.result.summary["levels"] = std::move(lv);
    if (expect == "solution" && max_abs.size() >= 2) {
        double worst = kInfinity;
        Json orders = Json::array();
        for (std::size_t k = 1; k < max_abs.size(); ++k) {
            const double o = std::log2(max_abs[k - 1] / max_abs[k]);
            orders.push_back(num(o));
            worst = std::min(worst, o);
        }
        ctx.result.summary["observed_orders"] = std::move(orders);
        ctx.check_ge("observed_order", worst, 1.9);
    }
}

// Closed-form radial solutions of the p-Laplacian, when one is known.
std::optional<std::function<double(double)>> radial_oracle(const OperatorSpec& spec, int n, double c,
                                                           RadialCoordinates coords, double r0, double r1, double u0,
                                                           double u1) {
    if (spec.kind != OperatorKind::PLaplacian) return std::nullopt;
    const double sc = std::sqrt(c);
    if (coords == RadialCoordinates::Horospherical) {
        const double k = (n - 1) * sc / (spec.p - 1.0);
        const double e0 = std::exp(k * (r0 - r1));
        return [=](double s) { return u0 + (u1 - u0) * (std::exp(k * (s - r1)) - e0) / (1.0 - e0); };
    }
    if (spec.p != 2.0 || (n != 2 && n != 3)) return std::nullopt;
    auto F = [=](double r) { return n == 2 ? std::log(std::tanh(0.5 * sc * r)) : -1.0 / std::tanh(sc * r); };
    const double f0 = F(r0), f1 = F(r1);
    return [=](double r) { return u0 + (u1 - u0) * (F(r) - f0) / (f1 - f0); };
}

void run_radial(Context& ctx) {
    const OperatorSpec spec = ctx.op(ctx.run.text("operator"));
    RadialGrid grid;
    grid.r0 = ctx.run.number("r0");
    grid.r1 = ctx.run.number("r1");
    grid.nodes = ctx.run.integer("nodes");
    grid.grading = ctx.run.number("grading");
    grid.coordinates = ctx.run.text("coordinates") == "spherical" ? RadialCoordinates::Spherical
                                                                   : RadialCoordinates::Horospherical;
    const double u0 = ctx.run.number("u_lo"), u1 = ctx.run.number("u_hi");
    const Model m = ctx.model();
    const RadialSolution sol = solve_radial_bvp(spec, m.n, m.c, grid, u0, u1, ctx.cfg.numerics.solver_tol);
    ctx.write("radial.csv", io::radial_csv(sol));
    auto& sum = ctx.result.summary;
    sum["converged"] = sol.converged;
    sum["status"] = sol.status;
    sum["iterations"] = sol.iterations;
    sum["flux_constant"] = sol.flux_constant;
    sum["residual_norm"] = num(sol.residual_norm);
    ctx.check_true("converged", sol.converged);
    const double lo = std::min(u0, u1), hi = std::max(u0, u1), scale = std::max(1.0, hi - lo);
    double excess = 0.0;
    for (double v : sol.values) excess = std::max({excess, lo - v, v - hi});
    ctx.check_le("max_principle_excess", excess, 10.0 * ctx.cfg.numerics.solver_tol * scale);
    if (auto oracle = radial_oracle(spec, m.n, m.c, grid.coordinates, grid.r0, grid.r1, u0, u1)) {
        double err = 0.0;
        for (std::size_t i = 0; i < sol.nodes.size(); ++i) err = std::max(err, std::abs(sol.values[i] - (*oracle)(sol.nodes[i])));
        sum["oracle_error"] = err;
        ctx.check_le("oracle_error", err, ctx.run.number("oracle_tol"));
    }
}

void run_disk(Context& ctx) {
    const OperatorSpec spec = ctx.op(ctx.run.text("operator"));
    const Model m = ctx.model();
    const std::string data = ctx.run.text("data");
    DiskGrid grid;
    grid.r_trunc = ctx.run.number("r_trunc");
    grid.nr = ctx.run.integer("nr");
    grid.ntheta = ctx.run.integer("ntheta");
    grid.c = m.c;
    DiskOptions opts;
    opts.sampling = ctx.run.text("sampling") == "pointwise" ? BoundarySampling::Pointwise : BoundarySampling::CellAverage;
    const double rad = std::tanh(0.5 * m.sqrt_c() * grid.r_trunc);
    std::optional<ScalarField> field;
    std::function<double(double)> bc;
    if (data == "constant") {
        const double v = ctx.run.number("value");
        bc = [v](double) { return v; };
    } else if (data == "trace") {
        const Horosphere hs = ctx.horosphere(ctx.run.text("horosphere"));
        grid.puncture = hs.ideal;
        field.emplace(trace_profile(ctx, spec, hs, grid.r_trunc), distance::Horospherical{hs}, m);
        bc = [&, rad](double th) {
            Vec x(2);
            x << rad * std::cos(th), rad * std::sin(th);
            return (*field)(x);
        };
    } else {
        Vec e(2);
        e << 1.0, 0.0;
        grid.puncture = IdealPoint(e);
        const double plateau = ctx.run.number("plateau"), w = ctx.run.number("width");
        bc = [=](double th) { return std::abs(std::remainder(th, 2.0 * std::numbers::pi)) <= w ? plateau : 0.0; };
    }
    grid.clustering = ctx.run.has("clustering") ? ctx.run.number("clustering")
                      : grid.puncture        ? defaults::angular_clustering
                                             : 1.0;
    const double tol = ctx.cfg.numerics.solver_tol;
    const SolverResult sol = solve_disk(spec, grid, bc, tol, opts);
    ctx.write("solution.csv", io::solution_csv(grid, sol));
    ctx.write("solution.json", io::dump(io::solution_json(grid, sol, tol)));
    auto& sum = ctx.result.summary;
    sum["converged"] = sol.converged;
    sum["status"] = sol.status;
    sum["iterations"] = sol.iterations;
    sum["residual_norm"] = num(sol.residual_norm);
    sum["clustering"] = grid.clustering;
    ctx.check_le("residual_norm", sol.residual_norm, tol);

    double lo = kInfinity, hi = -kInfinity;
    for (int j = 0; j < grid.ntheta; ++j) {
        lo = std::min(lo, sol.values[grid.index(grid.nr, j)]);
        hi = std::max(hi, sol.values[grid.index(grid.nr, j)]);
    }
    double excess = 0.0;
    for (double v : sol.values) excess = std::max({excess, lo - v, v - hi});
    sum["max_principle_excess"] = excess;
    const double oracle_tol = ctx.run.number("oracle_tol");
    ctx.check_le("max_principle_excess", excess, oracle_tol);
    if (data != "spike") {
        double err = 0.0;
        for (int i = 0; i <= grid.nr; ++i)
            for (int j = 0; j < grid.ntheta; ++j) {
                const double exact = field ? (*field)(grid.node(i, j)) : ctx.run.number("value");
                err = std::max(err, std::abs(sol.values[grid.index(i, j)] - exact));
            }
        sum["oracle_error"] = err;
        ctx.check_le("oracle_error", err, oracle_tol);
    }
}

void run_probe(Context& ctx) {
    const OperatorSpec spec = ctx.op(ctx.run.text("operator"));
    const Model m = ctx.model();
    const bool trace = ctx.run.text("data") == "trace";
    const auto rs = ctx.run.numbers("r_sequence");
    const auto ann = ctx.run.numbers("annulus");
    ProbeGrid gp;
    gp.nodes_per_unit = ctx.run.number("nodes_per_unit");
    gp.ntheta = ctx.run.integer("ntheta");
    gp.annulus_lo = ann[0];
    gp.annulus_hi = ann[1];
    gp.clustering = ctx.run.number("clustering");
    gp.tol = ctx.cfg.numerics.solver_tol;

    Vec e(2);
    e << 1.0, 0.0;
    std::optional<IdealPoint> p1 = IdealPoint(e);
    std::optional<ScalarField> field;
    if (trace) {
        const Horosphere hs = ctx.horosphere(ctx.run.text("horosphere"));
        p1 = hs.ideal;
        field.emplace(trace_profile(ctx, spec, hs, rs.back()), distance::Horospherical{hs}, m);
    }
    const ProbeReport rep = removability_probe(spec, *p1, ctx.run.number("plateau"), rs, gp, field, ctx.parallel);
    for (std::size_t k = 0; k < rep.entries.size(); ++k)
        ctx.write("solution_R" + io::format_number(rep.entries[k].r_trunc) + ".csv",
                  io::solution_csv(rep.grids[k], rep.solutions[k]));
    const Json pj = io::probe_json(rep, gp);
    ctx.write("probe.json", io::dump(pj));
    ctx.result.summary = pj;

    bool all = true;
    for (const auto& en : rep.entries) all = all && en.converged;
    ctx.check_true("all_converged", all);
    if (trace) {
        double dev = 0.0;
        for (const auto& en : rep.entries) dev = std::max(dev, std::abs(en.sup - en.reference_sup));
        ctx.check_le("track_deviation", dev, ctx.run.number("track_tol"));
    } else {
        double rise = 0.0;
        for (std::size_t k = 1; k < rep.entries.size(); ++k)
            rise = std::max(rise, rep.entries[k].sup - rep.entries[k - 1].sup);
        ctx.check_le("sup_increase", rise, 1e-9 * std::max(1.0, ctx.run.number("plateau")));
        ctx.check_le("last_increment", rep.last_increment(), ctx.run.number("increment_tol"));
    }
}

}  // namespace

bool RunResult::passed() const {
    return completed && std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

RunResult execute_run(const ExperimentConfig& config, const RunConfig& run, const fs::path& root, std::uint64_t seed,
                      bool parallel_solves) {
    Context ctx(config, run, root, seed, parallel_solves);
    try {
        if (run.kind == "classify") run_classify(ctx);
        else if (run.kind == "barriers") run_barriers(ctx);
        else if (run.kind == "residuals") run_residuals(ctx);
        else if (run.kind == "radial-bvp") run_radial(ctx);
        else if (run.kind == "disk-solve") run_disk(ctx);
        else if (run.kind == "removability-probe") run_probe(ctx);
        else fail(ErrorCode::ValidationError, "unknown experiment kind '" + run.kind + "'");
        ctx.result.completed = true;
    } catch (const Error& e) {
        ctx.result.error = e.what();
        ctx.result.error_code = std::string(to_string(e.code()));
    } catch (const std::exception& e) {
        ctx.result.error = e.what();
        ctx.result.error_code = "Internal";
    }
    return std::move(ctx.result);
}

int exit_code(const std::vector<RunResult>& runs) {
    if (std::any_of(runs.begin(), runs.end(), [](const RunResult& r) { return !r.completed; })) return 1;
    if (std::any_of(runs.begin(), runs.end(), [](const RunResult& r) { return !r.passed(); })) return 2;
    return 0;
}

Json make_report(const ExperimentConfig* config, std::uint64_t seed, const std::vector<RunResult>& runs,
                 const std::string& timestamp) {
    Json r;
    r["tool"] = "asymlab";
    r["version"] = "0.1.0";
    r["timestamp"] = timestamp;
    r["seed"] = seed;
    if (config) r["title"] = config->global.title;
    const bool incomplete = std::any_of(runs.begin(), runs.end(), [](const RunResult& x) { return !x.completed; });
    r["incomplete"] = incomplete;
    r["exit_code"] = exit_code(runs);
    r["passed"] = exit_code(runs) == 0;
    Json arr = Json::array();
    for (const auto& run : runs) {
        Json j;
        j["name"] = run.name;
        j["kind"] = run.kind;
        j["completed"] = run.completed;
        j["passed"] = run.passed();
        if (!run.completed) {
            j["error_code"] = run.error_code;
            j["error"] = run.error;
        }
        Json as = Json::array();
        for (const auto& a : run.assertions) {
            Json x;
            x["name"] = a.name;
            if (a.value) {
                x["value"] = num(*a.value);
                x["tolerance"] = num(*a.tolerance);
                x["relation"] = a.relation;
            } else {
                x["expected"] = a.expected;
                x["actual"] = a.actual;
            }
            x["passed"] = a.passed;
            as.push_back(std::move(x));
        }
        j["assertions"] = std::move(as);
        j["summary"] = run.summary;
        j["files"] = run.files;
        arr.push_back(std::move(j));
    }
    r["runs"] = std::move(arr);
    if (config) r["config"] = serialize_config(*config);
    return r;
}

fs::path emit_report(const fs::path& root, const Json& report) {
    const fs::path path = root / "report.json";
    io::write_file(path, io::dump(report));
    return path;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const fs::path root = options.output.empty() ? fs::path(config.global.output) : options.output;
    const std::uint64_t seed = options.seed.value_or(config.global.seed);
    ExperimentOutcome out;
    if (options.parallel) {
        std::vector<std::future<RunResult>> jobs;
        for (const auto& run : config.runs)
            jobs.push_back(std::async(std::launch::async, [&, &run = run] { return execute_run(config, run, root, seed); }));
        for (auto& j : jobs) out.runs.push_back(j.get());
    } else {
        for (const auto& run : config.runs) out.runs.push_back(execute_run(config, run, root, seed));
    }
    out.exit_code = exit_code(out.runs);
    const Json report = make_report(&config, seed, out.runs, options.timestamp.empty() ? utc_timestamp() : options.timestamp);
    out.report_path = emit_report(root, report);
    return out;
}

std::optional<std::uint64_t> seed_from_env(const char* value) {
    if (!value || !*value) return std::nullopt;
    const std::string_view s(value);
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
    require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::ValidationError,
            "ASYMLAB_SEED must be a non-negative integer, got '" + std::string(s) + "'");
    return seed;
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace asymlab::cli
