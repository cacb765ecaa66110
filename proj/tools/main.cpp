// Command-line front end: runs allocation experiments from a config file,
// validates configs, and prints the simulator's exact expected outcomes.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simalloc/config.hpp"
#include "simalloc/experiment.hpp"
#include "simalloc/sim.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::vector<std::string> strategies;
    bool parallel_strategies = false;
};

simalloc::ExperimentConfig load_with_overrides(const CliOptions& opt) {
    auto config = simalloc::load_config(opt.config_path);
    if (opt.seed) config.master_seed = *opt.seed;
    if (opt.out_dir) config.out_dir = *opt.out_dir;
    if (opt.threads) config.threads = *opt.threads;
    if (!opt.strategies.empty()) config.strategies = opt.strategies;
    if (opt.parallel_strategies) config.parallel_strategies = true;
    simalloc::validate_config(config);
    return config;
}

int cmd_run(const CliOptions& opt) {
    const auto config = load_with_overrides(opt);
    const auto bundle = simalloc::run_experiment(config);
    simalloc::emit_plot_data(bundle, config.out_dir);
    for (const auto& s : bundle.outcomes) {
        std::printf("%-28s %-16s total runs %8lld   %.2f s\n", s.name.c_str(),
                    simalloc::to_string(s.report.status).c_str(),
                    static_cast<long long>(s.report.total_runs), s.wall_seconds);
    }
    std::printf("outputs written to %s\n", config.out_dir.c_str());
    return 0;
}

int cmd_validate(const CliOptions& opt) {
    load_with_overrides(opt);
    std::printf("%s: OK\n", opt.config_path.c_str());
    return 0;
}

int cmd_oracle(const CliOptions& opt) {
    const auto config = load_with_overrides(opt);
    const auto grid = simalloc::build_grid(config.grid);
    std::printf("TC,expected_od_deaths\n");
    for (const auto& cond : grid.active()) {
        const auto params = simalloc::condition_params(config.sim, cond);
        std::printf("%s,%.4f\n", cond.label.c_str(), simalloc::expected_outcome(params));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Treatment-effect estimation under a simulation budget"};
    app.require_subcommand(1);

    CliOptions opt;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", opt.config_path, "experiment config file (JSON)")->required();
        cmd->add_option("--seed", opt.seed, "override master_seed");
        cmd->add_option("--strategies", opt.strategies, "override strategy list")->delimiter(',');
    };

    auto* run = app.add_subcommand("run", "run the selected strategies and write reports");
    add_common(run);
    run->add_option("--out-dir", opt.out_dir, "override output directory");
    run->add_option("--threads", opt.threads, "replication threads per batch");
    run->add_flag("--parallel-strategies", opt.parallel_strategies,
                  "run independent strategies concurrently");

    auto* validate = app.add_subcommand("validate", "parse and validate a config, then exit");
    add_common(validate);

    auto* oracle = app.add_subcommand("oracle", "print exact expected OD deaths per condition");
    add_common(oracle);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(opt);
        if (validate->parsed()) return cmd_validate(opt);
        if (oracle->parsed()) return cmd_oracle(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
