#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "asymlab/defaults.hpp"
#include "asymlab/error.hpp"
#include "asymlab/operator_family.hpp"

namespace asymlab::cli {

/// A config value: number, string, or a list of either. Integers are stored
/// as numbers and checked on conversion.
using Value = std::variant<double, std::string, std::vector<double>, std::vector<std::string>>;

struct GlobalConfig {
    std::uint64_t seed = 0;
    std::string output = "out";
    std::string title;
    bool operator==(const GlobalConfig&) const = default;
};

struct OperatorConfig {
    std::string name;
    std::string kind;  // pLaplacian | minimalGraph | custom
    double p = 2.0;
    std::string formula;  // custom only
    double scale = 1.0;
    double exponent = 1.0;
    StructuralConstants constants;
    std::optional<double> k0;
    bool operator==(const OperatorConfig&) const = default;
};

struct GeodesicConfig {
    std::string from;
    std::string to;
    bool operator==(const GeodesicConfig&) const = default;
};

/// Horosphere at an ideal point, through the point at signed distance t from
/// the origin along the ray towards it.
struct HorosphereConfig {
    std::string ideal;
    double t = 0.0;
    bool operator==(const HorosphereConfig&) const = default;
};

struct GeometryConfig {
    int n = 2;
    double c = 1.0;
    std::map<std::string, std::vector<double>> ideal_points;
    std::map<std::string, GeodesicConfig> geodesics;
    std::map<std::string, HorosphereConfig> horospheres;
    bool operator==(const GeometryConfig&) const = default;
};

struct NumericsConfig {
    double quad_tol = defaults::quad_tol;
    double solver_tol = defaults::solver_tol;
    double residual_tol = defaults::residual_tol;
    double allowance_factor = defaults::allowance_factor;
    int profile_nodes = defaults::profile_nodes;
    bool operator==(const NumericsConfig&) const = default;
};

inline constexpr std::string_view kRunKinds[] = {"classify",  "barriers",   "residuals",
                                                 "radial-bvp", "disk-solve", "removability-probe"};

struct RunConfig {
    std::string name;
    std::string kind;
    std::map<std::string, Value> params;  // kind-specific, defaults filled in

    bool has(const std::string& key) const { return params.count(key) != 0; }
    double number(const std::string& key) const;
    int integer(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
    std::vector<std::string> texts(const std::string& key) const;
    bool operator==(const RunConfig&) const = default;
};

struct ExperimentConfig {
    GlobalConfig global;
    std::vector<OperatorConfig> operators;  // in file order
    GeometryConfig geometry;
    NumericsConfig numerics;
    std::vector<RunConfig> runs;  // in file order

    const OperatorConfig* find_operator(const std::string& name) const;
    bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigIssue {
    int line = 0;  // 0 when the issue is not tied to one line
    std::string message;
};

/// Carries every problem found in a config. The code is ParseError when any
/// line is malformed, ValidationError when the text parses but is invalid.
class ConfigError : public Error {
public:
    ConfigError(ErrorCode code, std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

/// Sectioned `key = value` text: [global], [operator.NAME], [geometry],
/// [numerics], [run.NAME]. `#` and `;` start comments. Lists are comma
/// separated, optionally in brackets; strings may be double-quoted.
ExperimentConfig parse_config(std::string_view text);

/// Canonical text that parse_config maps back to an equal config.
std::string serialize_config(const ExperimentConfig& config);

OperatorSpec build_operator(const OperatorConfig& config);

}  // namespace asymlab::cli
