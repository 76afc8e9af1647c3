// Config-driven experiment runner.
//
//   iafb_cli --config run.cfg [--output run.csv] [--seed N] [--solver afb|ahpe] [--calibrate-fstar]
//   iafb_cli compare a.csv b.csv [--output summary.csv]
//
// Exit codes: 0 ok, 1 usage, 2 invalid config, 3 solver failure, 4 I/O failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iafb/afb_solver.hpp"
#include "iafb/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kRuntime = 3, kIo = 4 };

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw iafb::IoError("cannot open '" + path + "' for writing");
    fn(out);
    out.close();
    if (!out) throw iafb::IoError("write failure on '" + path + "'");
}

int run(const std::string& config_path, const std::string& output, const std::optional<std::uint64_t>& seed,
        const std::string& solver, bool calibrate) {
    std::ifstream in(config_path);
    if (!in) throw iafb::IoError("cannot open '" + config_path + "'");
    iafb::ExperimentConfig config = iafb::parse_config(in, config_path);
    if (seed) iafb::set_config_value(config, "seed", std::to_string(*seed));
    if (!solver.empty()) iafb::set_config_value(config, "solver", solver);
    if (calibrate) iafb::set_config_value(config, "calibrate_fstar", "true");
    const iafb::RunLog log = iafb::run_experiment(config);
    with_output(output, [&](std::ostream& os) { iafb::write_log(os, log); });
    return kOk;
}

int compare(const std::vector<std::string>& paths, const std::string& output) {
    std::vector<std::pair<std::string, iafb::RunLog>> runs;
    for (const auto& p : paths) {
        std::ifstream in(p);
        if (!in) throw iafb::IoError("cannot open '" + p + "'");
        try {
            runs.emplace_back(p, iafb::read_log(in));
        } catch (const iafb::IoError& e) {
            throw iafb::IoError(p + ": " + e.what());
        }
    }
    const auto summaries = iafb::compare_runs(runs);
    with_output(output, [&](std::ostream& os) { iafb::write_summary(os, summaries); });
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inexact accelerated forward-backward experiments"};
    std::string config_path;
    std::string output;
    std::optional<std::uint64_t> seed;
    std::string solver;
    bool calibrate = false;
    app.add_option("--config", config_path, "Experiment config file");
    app.add_option("--output", output, "Log file (stdout when omitted)");
    app.add_option("--seed", seed, "Override the config seed");
    app.add_option("--solver", solver, "Override the solver")->check(CLI::IsMember({"afb", "ahpe"}));
    app.add_flag("--calibrate-fstar", calibrate, "Estimate F* with a longer pre-run");

    auto* cmp = app.add_subcommand("compare", "Summarize logs of runs on the same problem");
    std::vector<std::string> logs;
    std::string cmp_output;
    cmp->add_option("logs", logs, "Run logs")->required();
    cmp->add_option("--output", cmp_output, "Summary file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*cmp) return compare(logs, cmp_output);
        if (config_path.empty()) {
            std::cerr << "--config is required\n" << app.help();
            return kUsage;
        }
        return run(config_path, output, seed, solver, calibrate);
    } catch (const iafb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const iafb::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const iafb::SolverError& e) {
        std::cerr << "solver error at iteration " << e.iteration() << ": " << e.what() << '\n';
        return kRuntime;
    } catch (const std::invalid_argument& e) {
        // compare_runs on mismatched problems, or bad input to the builders
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kRuntime;
    }
}
