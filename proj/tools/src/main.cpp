// asymlab command-line front end.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "asymlab_cli/config.hpp"
#include "asymlab_cli/runner.hpp"

namespace {

using namespace asymlab;
using namespace asymlab::cli;

struct OperatorFlags {
    std::string name = "minimalGraph";
    double p = 2.0;
    std::string formula = "saturating_power";
    double scale = 1.0;
    double exponent = 4.0;

    void attach(CLI::App* app) {
        app->add_option("--operator", name, "pLaplacian, minimalGraph, or custom")
            ->check(CLI::IsMember({"pLaplacian", "minimalGraph", "custom"}));
        app->add_option("--p", p, "p-Laplacian exponent (> 1)");
        app->add_option("--formula", formula, "custom formula name");
        app->add_option("--scale", scale, "custom formula scale K");
        app->add_option("--exponent", exponent, "custom formula exponent m");
    }

    OperatorConfig config() const {
        OperatorConfig op;
        op.name = "op";
        op.kind = name;
        op.p = p;
        op.formula = formula;
        op.scale = scale;
        op.exponent = exponent;
        // Conservative constants for every builtin formula with m >= 1:
        // A <= K, and K(1 - 2^-m)/4 stays below A(s)/s on [0, 1].
        if (name == "custom") op.constants = {scale, 1.0, 1.0, 1.0, 0.25 * scale * (1.0 - std::exp2(-exponent))};
        return op;
    }
};

// Single-run configs for the shortcut subcommands go through parse_config so
// that they receive exactly the validation and defaults of a config file.
ExperimentConfig single_run(const OperatorFlags& flags, const std::string& run_body, const std::string& geometry) {
    ExperimentConfig tmp;
    tmp.operators.push_back(flags.config());
    std::string text = serialize_config(tmp);
    const auto geo = text.find("[geometry]");
    const auto num = text.find("[numerics]");
    text = text.substr(0, geo) + "[geometry]\n" + geometry + "\n" + text.substr(num);
    text += "\n[run.main]\n" + run_body;
    return parse_config(text);
}

int execute(const ExperimentConfig& cfg, const std::string& out, bool parallel, bool print) {
    RunOptions opts;
    opts.output = out;
    opts.parallel = parallel;
    opts.seed = seed_from_env(std::getenv("ASYMLAB_SEED"));
    const ExperimentOutcome res = run_experiment(cfg, opts);
    if (print) std::cout << io::read_file(res.report_path);
    for (const auto& r : res.runs) {
        if (!r.completed) std::cerr << "run " << r.name << " did not complete: " << r.error << "\n";
        for (const auto& a : r.assertions)
            if (!a.passed) std::cerr << "run " << r.name << ": assertion " << a.name << " failed\n";
    }
    std::cerr << "report: " << res.report_path.string() << "\n";
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for quasi-linear elliptic operators on hyperbolic space"};
    app.require_subcommand(1);

    std::string config_path, out;
    bool parallel = false;
    auto* run = app.add_subcommand("run", "Run every block of an experiment config");
    run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    run->add_flag("--parallel", parallel, "run independent blocks concurrently");
    run->add_option("--out", out, "output directory (overrides [global] output)");

    OperatorFlags cls_op;
    std::string cls_out = "out";
    auto* cls = app.add_subcommand("classify", "Classify one operator");
    cls_op.attach(cls);
    cls->add_option("--out", cls_out, "output directory");

    OperatorFlags bar_op;
    std::string bar_kind = "scherk", bar_out = "out";
    double delta = 0.0, rho = 1.0, K = 1.0, b = 1.0, c = 1.0;
    int n = 2;
    auto* bar = app.add_subcommand("barriers", "Tabulate a barrier profile");
    bar_op.attach(bar);
    bar->add_option("--barrier", bar_kind)->check(CLI::IsMember({"scherk", "annulus", "singular"}));
    bar->add_option("--delta", delta);
    bar->add_option("--rho", rho);
    bar->add_option("--K", K);
    bar->add_option("--b", b);
    bar->add_option("--n", n);
    bar->add_option("--c", c);
    bar->add_option("--out", bar_out, "output directory");

    OperatorFlags pr_op;
    std::string pr_data = "spike", pr_out = "out";
    double plateau = 1.0, t = 4.0;
    std::vector<double> rseq{3, 4, 5, 6};
    auto* probe = app.add_subcommand("probe", "Removability probe on growing truncated disks");
    pr_op.attach(probe);
    probe->add_option("--data", pr_data)->check(CLI::IsMember({"spike", "trace"}));
    probe->add_option("--plateau", plateau);
    probe->add_option("--horosphere-t", t, "trace data: horosphere through the point at this distance towards (1,0)");
    probe->add_option("--r-sequence", rseq)->delimiter(',');
    probe->add_option("--out", pr_out, "output directory");

    // Usage errors are operational errors; only --help exits 0.
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            const ExperimentConfig cfg = parse_config(io::read_file(config_path));
            return execute(cfg, out, parallel, false);
        }
        const std::string g2 = "n = 2\nc = 1\nideal.p1 = [1, 0]\n";
        if (*cls) {
            return execute(single_run(cls_op, "kind = classify\noperators = [op]\n", g2), cls_out, false, true);
        }
        if (*bar) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "kind = barriers\noperator = op\nbarrier = %s\ndelta = %.17g\nrho = %.17g\nK = %.17g\nb = %.17g\n",
                          bar_kind.c_str(), delta, rho, K, b);
            const std::string geo = "n = " + std::to_string(n) + "\nc = " + io::format_number(c) + "\n";
            return execute(single_run(bar_op, buf, geo), bar_out, false, true);
        }
        if (*probe) {
            std::string body = "kind = removability-probe\noperator = op\ndata = " + pr_data +
                               "\nplateau = " + io::format_number(plateau) + "\nr_sequence = [";
            for (std::size_t i = 0; i < rseq.size(); ++i) body += (i ? ", " : "") + io::format_number(rseq[i]);
            body += "]\n";
            std::string geo = g2;
            if (pr_data == "trace") {
                body += "horosphere = h\n";
                geo += "horosphere.h = p1, " + io::format_number(t) + "\n";
            }
            return execute(single_run(pr_op, body, geo), pr_out, false, true);
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
