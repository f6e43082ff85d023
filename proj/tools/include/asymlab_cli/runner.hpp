#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "asymlab/io.hpp"
#include "asymlab_cli/config.hpp"

namespace asymlab::cli {

/// One checked claim. Numeric claims carry the value, the tolerance it was
/// checked against and the relation (value <= tolerance, value >= tolerance);
/// categorical claims carry expected/actual strings.
struct Assertion {
    std::string name;
    std::optional<double> value;
    std::optional<double> tolerance;
    std::string relation;
    std::string expected;
    std::string actual;
    bool passed = false;
};

struct RunResult {
    std::string name;
    std::string kind;
    bool completed = false;
    std::string error;  // what() of the exception that stopped the run
    std::string error_code;
    std::vector<Assertion> assertions;
    io::Json summary = io::Json::object();
    std::vector<std::string> files;  // relative to the output root

    bool passed() const;
};

struct RunOptions {
    std::filesystem::path output;         // empty: the config's output directory
    bool parallel = false;                // run blocks concurrently
    std::optional<std::uint64_t> seed;    // overrides the config seed
    std::string timestamp;                // empty: current UTC time
};

struct ExperimentOutcome {
    std::vector<RunResult> runs;
    int exit_code = 0;
    std::filesystem::path report_path;
};

/// Executes one run block, writing its data files under root/<run name>/.
/// Library errors are caught and recorded; the result is then incomplete.
RunResult execute_run(const ExperimentConfig& config, const RunConfig& run, const std::filesystem::path& root,
                      std::uint64_t seed, bool parallel_solves = true);

/// All run blocks, then report.json in the output root.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// 0 when every run completed and passed, 1 when any run failed to complete,
/// 2 otherwise.
int exit_code(const std::vector<RunResult>& runs);

io::Json make_report(const ExperimentConfig* config, std::uint64_t seed, const std::vector<RunResult>& runs,
                     const std::string& timestamp);

/// Writes report.json under `root`; returns its path. Throws IoError.
std::filesystem::path emit_report(const std::filesystem::path& root, const io::Json& report);

/// Parses an ASYMLAB_SEED value; nullopt for null/empty, ValidationError for junk.
std::optional<std::uint64_t> seed_from_env(const char* value);

std::string utc_timestamp();

}  // namespace asymlab::cli
