// sedlab — stochastic-electrodynamics laboratory CLI
//
//   sedlab run <config.json>   [--out DIR] [--threads N] [--seed N] [--check]
//   sedlab sweep <config.json> --axis NAME [--out DIR] [--threads N] [--seed N] [--check]
//
// SEDLAB_OUT_DIR sets the default output directory.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sedlab/errors.hpp"
#include "sedlab/experiment.hpp"

namespace {

void apply_overrides(sedlab::ExperimentConfig& cfg, const std::string& out_dir,
                     int threads, long long seed) {
    if (!out_dir.empty()) {
        cfg.output_dir = out_dir;
    } else if (const char* env = std::getenv("SEDLAB_OUT_DIR");
               env != nullptr && cfg.output_dir == ".") {
        cfg.output_dir = env;
    }
    if (threads > 0) cfg.threads = threads;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
}

void print_summary(const sedlab::RunManifest& m) {
    std::cout << m.experiment << ": " << (m.pass ? "PASS" : "FAIL")
              << "  (config " << m.config_hash << ", " << m.wall_time_s
              << " s)\n";
    for (const auto& c : m.checks) {
        std::cout << "  [" << (c.pass ? "ok" : "FAIL") << "] " << c.name
                  << "  value=" << c.value << " target=" << c.target;
        if (c.tolerance > 0.0) std::cout << " tol=" << c.tolerance;
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sedlab: zero-point-field particle dynamics laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir, axis;
    int threads = 0;
    long long seed = -1;
    bool check = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config (JSON)")
            ->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--threads", threads, "worker thread count");
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_flag("--check", check, "exit nonzero on tolerance failure");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
    add_common(run_cmd);
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "run an experiment over one swept axis");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--axis", axis, "swept parameter name");

    CLI11_PARSE(app, argc, argv);

    try {
        sedlab::ExperimentConfig cfg = sedlab::load_config(config_path);
        apply_overrides(cfg, out_dir, threads, seed);

        bool all_pass = true;
        if (run_cmd->parsed()) {
            const sedlab::RunManifest m = sedlab::run(cfg);
            print_summary(m);
            all_pass = m.pass;
        } else {
            const auto manifests = sedlab::sweep(cfg, axis);
            for (const auto& m : manifests) {
                print_summary(m);
                all_pass = all_pass && m.pass;
            }
        }
        if (check && !all_pass) return 1;
        return 0;
    } catch (const sedlab::ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const sedlab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
