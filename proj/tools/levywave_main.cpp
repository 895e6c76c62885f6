#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "levywave/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"stochastic wave equation driven by pure-jump Levy noise: "
                 "simulation and numerical certification"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    long long seed = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--seed", seed, "override run.seed");
        cmd->add_option("--out", out_dir, "override output.directory");
    };

    std::vector<std::string> commands{"simulate", "verify-kernels", "verify-moments",
                                      "sobolev", "all"};
    for (const auto& name : commands) add_common(app.add_subcommand(name));

    auto* plot = app.add_subcommand("plot", "emit tidy plot data from stored artifacts");
    std::string artifact_dir, plot_out = "plots";
    std::vector<std::string> selections;
    plot->add_option("--artifacts", artifact_dir, "artifact directory of a previous run")
        ->required();
    plot->add_option("--out", plot_out, "output directory");
    plot->add_option("--select", selections, "profiles | increments | fits | moments");

    CLI11_PARSE(app, argc, argv);

    try {
        if (plot->parsed()) {
            levywave::emit_plot_data(artifact_dir, selections, plot_out);
            return 0;
        }
        for (const auto& name : commands) {
            if (!app.get_subcommand(name)->parsed()) continue;
            levywave::ExperimentConfig cfg = levywave::load_config(config_path);
            if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            levywave::RunReport rep = levywave::run_command(name, cfg);
            std::printf("%s: %d/%d checks passed, %zu artifacts in %s\n", name.c_str(),
                        rep.checks_passed, rep.checks_run, rep.artifacts.size(),
                        cfg.out_dir.c_str());
            return rep.exit_code;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
