#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asymlab/elliptic_solver.hpp"
#include "asymlab/field_synthesis.hpp"
#include "asymlab/profile.hpp"

namespace asymlab::io {

using Json = nlohmann::ordered_json;

/// %.17g, so every double round-trips; non-finite values print as nan/inf/-inf.
std::string format_number(double x);

/// Deterministic JSON text: insertion-ordered keys, numbers via format_number,
/// non-finite numbers as null, two-space indentation, trailing newline.
std::string dump(const Json& value);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

std::string profile_csv(const Profile& profile);
Json profile_json(const Profile& profile);

/// One row per grid node; the centre node appears once.
std::string solution_csv(const DiskGrid& grid, const SolverResult& result);
Json solution_json(const DiskGrid& grid, const SolverResult& result, double tol);

std::string radial_csv(const RadialSolution& solution);

/// Columns x0..x{n-1}, residual.
std::string residual_csv(const ResidualReport& report);
Json residual_json(const ResidualReport& report);

std::string trace_csv(const std::vector<TraceEntry>& trace);
Json trace_json(const std::vector<TraceEntry>& trace, const TraceVerdict& verdict);

/// Time series ordered by truncation radius.
Json probe_json(const ProbeReport& report, const ProbeGrid& grid);

}  // namespace asymlab::io
