#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "asymlab/io.hpp"

namespace fs = std::filesystem;
using asymlab::io::Json;

namespace {

const fs::path kScratch = ASYMLAB_SCRATCH;

struct Invocation {
    int status = -1;
    std::string out;
};

// Runs the binary with the given arguments; stdout is captured, stderr dropped.
Invocation run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " '" + std::string(ASYMLAB_BINARY) + "' " + args + " 2>/dev/null";
    Invocation inv;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return inv;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) inv.out.append(buf, n);
    const int raw = ::pclose(pipe);
    inv.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return inv;
}

fs::path fresh(const std::string& name) {
    const fs::path p = kScratch / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "experiment.ini";
    asymlab::io::write_file(p, text);
    return p;
}

Json load(const fs::path& p) { return Json::parse(asymlab::io::read_file(p)); }

}  // namespace

TEST(Cli, ClassifyPrintsPassingReport) {
    const fs::path dir = fresh("classify");
    const Invocation inv = run_cli("classify --operator minimalGraph --out '" + dir.string() + "'");
    ASSERT_EQ(inv.status, 0);
    const Json rep = Json::parse(inv.out);
    EXPECT_TRUE(rep["passed"].get<bool>());
    EXPECT_FALSE(rep["incomplete"].get<bool>());
    EXPECT_EQ(rep["runs"][0]["summary"]["operators"][0]["class"], "RemovableType");
    EXPECT_EQ(load(dir / "report.json"), rep);
}

TEST(Cli, WrongExpectationExitsTwo) {
    const fs::path dir = fresh("wrong");
    const fs::path cfg = write_config(dir, R"(
[global]
output = out
[operator.p2]
kind = pLaplacian
p = 2
[run.c]
kind = classify
operators = [p2]
expect = [RemovableType]
)");
    const Invocation inv = run_cli("run '" + cfg.string() + "' --out '" + (dir / "out").string() + "'");
    EXPECT_EQ(inv.status, 2);
    const Json rep = load(dir / "out" / "report.json");
    EXPECT_FALSE(rep["passed"].get<bool>());
    EXPECT_FALSE(rep["incomplete"].get<bool>());
    EXPECT_EQ(rep["exit_code"].get<int>(), 2);
}

TEST(Cli, LibraryErrorMarksReportIncomplete) {
    // Scherk profiles need a bounded flux.
    const fs::path dir = fresh("incomplete");
    const fs::path cfg = write_config(dir, R"(
[operator.p2]
kind = pLaplacian
p = 2
[run.s]
kind = barriers
operator = p2
barrier = scherk
)");
    const Invocation inv = run_cli("run '" + cfg.string() + "' --out '" + (dir / "out").string() + "'");
    EXPECT_EQ(inv.status, 1);
    const Json rep = load(dir / "out" / "report.json");
    EXPECT_TRUE(rep["incomplete"].get<bool>());
    EXPECT_EQ(rep["runs"][0]["error_code"], "NotRemovableType");
    EXPECT_FALSE(rep["runs"][0]["completed"].get<bool>());
}

TEST(Cli, InvalidConfigExitsOne) {
    const fs::path dir = fresh("invalid");
    const fs::path cfg = write_config(dir, "[operator.p]\nkind = pLaplacian\np = 0.5\n[run.c]\nkind = classify\noperators = [p]\n");
    EXPECT_EQ(run_cli("run '" + cfg.string() + "' --out '" + (dir / "out").string() + "'").status, 1);
    EXPECT_FALSE(fs::exists(dir / "out" / "report.json"));
    EXPECT_EQ(run_cli("run '" + (dir / "missing.ini").string() + "'").status, 1);
}

TEST(Cli, ReportsAreDeterministicApartFromTimestamp) {
    const fs::path dir = fresh("determinism");
    const std::string cfg = std::string(ASYMLAB_CONFIG_DIR) + "/residuals.ini";
    ASSERT_EQ(run_cli("run '" + cfg + "' --out '" + (dir / "a").string() + "'").status, 0);
    ASSERT_EQ(run_cli("run '" + cfg + "' --parallel --out '" + (dir / "b").string() + "'").status, 0);
    Json a = load(dir / "a" / "report.json"), b = load(dir / "b" / "report.json");
    a.erase("timestamp");
    b.erase("timestamp");
    EXPECT_EQ(a, b);
}

TEST(Cli, SeedOverrideReachesReport) {
    const fs::path dir = fresh("seed");
    const std::string cfg = std::string(ASYMLAB_CONFIG_DIR) + "/residuals.ini";
    ASSERT_EQ(run_cli("run '" + cfg + "' --out '" + dir.string() + "'", "ASYMLAB_SEED=4242").status, 0);
    const Json rep = load(dir / "report.json");
    EXPECT_EQ(rep["seed"].get<std::uint64_t>(), 4242u);
    for (const auto& run : rep["runs"])
        if (run["kind"] == "residuals") EXPECT_EQ(run["summary"]["seed"].get<std::uint64_t>(), 4242u);
    EXPECT_EQ(run_cli("run '" + cfg + "' --out '" + dir.string() + "'", "ASYMLAB_SEED=junk").status, 1);
}

TEST(Cli, ZeroPlateauProbeGivesZeroSolutions) {
    const fs::path dir = fresh("zero");
    const Invocation inv = run_cli("probe --operator minimalGraph --plateau 0 --r-sequence 3,4 --out '" + dir.string() + "'");
    ASSERT_EQ(inv.status, 0);
    int files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.path().extension() != ".csv") continue;
        ++files;
        std::istringstream in(asymlab::io::read_file(entry.path()));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            EXPECT_EQ(std::stod(line.substr(line.rfind(',') + 1)), 0.0) << entry.path() << ": " << line;
        }
    }
    EXPECT_EQ(files, 2);
}

TEST(Cli, ScherkTableMatchesClosedForm) {
    const fs::path dir = fresh("scherk");
    ASSERT_EQ(run_cli("barriers --operator minimalGraph --barrier scherk --out '" + dir.string() + "'").status, 0);
    std::istringstream in(asymlab::io::read_file(dir / "main" / "table.csv"));
    std::string line;
    int checked = 0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos || line == "r,value") continue;
        const double d = std::stod(line.substr(0, comma)), v = std::stod(line.substr(comma + 1));
        EXPECT_NEAR(v, std::log(1.0 / std::tanh(d / 2.0)), 1e-8) << line;
        ++checked;
        if (d == 1.0) EXPECT_NEAR(v, 0.77193683288790171, 1e-8);
    }
    EXPECT_GT(checked, 400);
}
