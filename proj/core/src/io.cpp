#include "asymlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "asymlab/error.hpp"

namespace asymlab::io {
namespace {

void dump_into(const Json& v, std::string& out, int depth) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close(2 * depth, ' ');
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, item] : v.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(key).dump() + ": ";
                dump_into(item, out, depth + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                dump_into(v[i], out, depth + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double x = v.get<double>();
            out += std::isfinite(x) ? format_number(x) : "null";
            return;
        }
        default:
            out += v.dump();
    }
}

Json endpoint_json(const Endpoint& e) {
    Json j;
    j["kind"] = std::string(to_string(e.kind));
    if (e.kind == EndpointKind::FiniteLimit) j["limit"] = e.limit;
    return j;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string dump(const Json& value) {
    std::string out;
    dump_into(value, out, 0);
    out += '\n';
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::IoError, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    f << text;
    f.flush();
    if (!f) fail(ErrorCode::IoError, "write to " + path.string() + " failed");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string profile_csv(const Profile& profile) {
    std::string out = "r,value\n";
    for (std::size_t i = 0; i < profile.size(); ++i)
        out += format_number(profile.grid()[i]) + "," + format_number(profile.values()[i]) + "\n";
    return out;
}

Json profile_json(const Profile& profile) {
    Json j;
    const auto [lo, hi] = profile.domain();
    j["domain"] = Json::array({number_or_null(lo), number_or_null(hi)});
    j["endpoint_lo"] = endpoint_json(profile.endpoint_lo());
    j["endpoint_hi"] = endpoint_json(profile.endpoint_hi());
    j["quad_tol"] = profile.quad_tol();
    j["node_count"] = profile.size();
    j["cubic_intervals"] = profile.cubic_intervals();
    j["warnings"] = profile.warnings();
    Json nodes = Json::array();
    for (std::size_t i = 0; i < profile.size(); ++i)
        nodes.push_back(Json::array({profile.grid()[i], profile.values()[i], profile.slopes()[i]}));
    j["node_columns"] = Json::array({"r", "value", "slope"});
    j["nodes"] = std::move(nodes);
    return j;
}

std::string solution_csv(const DiskGrid& grid, const SolverResult& result) {
    require(result.values.size() == grid.size(), ErrorCode::DimensionMismatch, "solution does not match the grid");
    std::string out = "r,theta,value\n";
    for (int i = 0; i <= grid.nr; ++i) {
        const int count = (i == 0 && grid.has_center()) ? 1 : grid.ntheta;
        for (int j = 0; j < count; ++j)
            out += format_number(grid.radius(i)) + "," + format_number(i == 0 && grid.has_center() ? 0.0 : grid.theta(j)) +
                   "," + format_number(result.values[grid.index(i, j)]) + "\n";
    }
    return out;
}

Json solution_json(const DiskGrid& grid, const SolverResult& result, double tol) {
    Json j;
    j["grid"] = {{"r_trunc", grid.r_trunc}, {"r_inner", grid.r_inner}, {"nr", grid.nr},
                 {"ntheta", grid.ntheta},   {"c", grid.c},             {"clustering", grid.clustering}};
    if (grid.puncture) {
        Json xi = Json::array();
        for (int k = 0; k < grid.puncture->n(); ++k) xi.push_back(grid.puncture->xi()(k));
        j["grid"]["puncture"] = std::move(xi);
    }
    j["tol"] = tol;
    j["converged"] = result.converged;
    j["status"] = result.status;
    j["iterations"] = result.iterations;
    j["residual_norm"] = result.residual_norm;
    j["damping_history"] = result.damping_history;
    j["residual_history"] = result.residual_history;
    return j;
}

std::string radial_csv(const RadialSolution& solution) {
    std::string out = "r,value\n";
    for (std::size_t i = 0; i < solution.nodes.size(); ++i)
        out += format_number(solution.nodes[i]) + "," + format_number(solution.values[i]) + "\n";
    return out;
}

std::string residual_csv(const ResidualReport& report) {
    std::string out;
    const int n = report.points.empty() ? 0 : report.points.front().n();
    for (int k = 0; k < n; ++k) out += "x" + std::to_string(k) + ",";
    out += "residual\n";
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        for (int k = 0; k < n; ++k) out += format_number(report.points[i].x()(k)) + ",";
        out += format_number(report.residuals[i]) + "\n";
    }
    return out;
}

Json residual_json(const ResidualReport& report) {
    Json j;
    j["samples"] = report.points.size();
    j["seed"] = report.seed;
    j["h"] = report.h;
    j["tol"] = report.tol;
    j["allowance_c"] = report.allowance_c;
    j["allowance_factor"] = report.allowance_factor;
    j["threshold"] = report.threshold();
    j["max_abs"] = report.max_abs;
    j["max_signed"] = report.max_signed;
    j["sign_violations"] = report.sign_violations;
    j["passed"] = report.passed();
    return j;
}

std::string trace_csv(const std::vector<TraceEntry>& trace) {
    std::string out = "boundary_distance,value\n";
    for (const auto& e : trace) out += format_number(e.boundary_distance) + "," + format_number(e.value) + "\n";
    return out;
}

Json trace_json(const std::vector<TraceEntry>& trace, const TraceVerdict& verdict) {
    Json j;
    j["limit"] = std::string(to_string(verdict.limit));
    j["last_value"] = number_or_null(verdict.last_value);
    j["slope"] = number_or_null(verdict.slope);
    Json rows = Json::array();
    for (const auto& e : trace) rows.push_back(Json::array({e.boundary_distance, number_or_null(e.value)}));
    j["entries"] = std::move(rows);
    return j;
}

Json probe_json(const ProbeReport& report, const ProbeGrid& grid) {
    Json j;
    j["operator"] = report.operator_name;
    j["plateau"] = report.plateau;
    j["trace_data"] = report.trace_data;
    j["annulus"] = Json::array({grid.annulus_lo, grid.annulus_hi});
    j["nodes_per_unit"] = grid.nodes_per_unit;
    j["ntheta"] = grid.ntheta;
    j["clustering"] = grid.clustering;
    j["tol"] = grid.tol;
    j["spike_width_rule"] = "w(R) = " + format_number(defaults::spike_width_numerator) + "/R";
    Json series = Json::array();
    for (const auto& e : report.entries) {
        Json row;
        row["r_trunc"] = e.r_trunc;
        if (!report.trace_data) row["spike_width"] = e.spike_width;
        row["sup"] = e.sup;
        if (report.trace_data) row["reference_sup"] = number_or_null(e.reference_sup);
        row["converged"] = e.converged;
        row["iterations"] = e.iterations;
        row["residual_norm"] = e.residual_norm;
        series.push_back(std::move(row));
    }
    j["entries"] = std::move(series);
    j["last_increment"] = report.last_increment();
    return j;
}

}  // namespace asymlab::io
