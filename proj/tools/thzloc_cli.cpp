// Command-line driver: single runs and parameter sweeps.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "thzloc/config.hpp"
#include "thzloc/results.hpp"
#include "thzloc/sweep.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

void add_common(CLI::App& cmd, CommonOptions& opts) {
    cmd.add_option("--config", opts.config_path, "JSON config (defaults when omitted)")->check(CLI::ExistingFile);
    cmd.add_option("--out", opts.out_path, "results file");
    cmd.add_option("--format", opts.format, "results format")->check(CLI::IsMember({"csv", "json"}));
    cmd.add_option("--seed", opts.seed, "rng seed, overrides the config");
    cmd.add_option("--threads", opts.threads, "worker threads per simulation")->check(CLI::PositiveNumber);
}

thzloc::sim::SimConfig resolve_config(const CommonOptions& opts) {
    auto config = opts.config_path.empty() ? thzloc::cli::config_from_json(nlohmann::json::object())
                                           : thzloc::cli::load_config(opts.config_path);
    if (opts.seed) config.rng_seed = *opts.seed;
    if (opts.threads) config.threads = *opts.threads;
    return config;
}

void finish(const std::vector<thzloc::cli::ResultRow>& rows, const CommonOptions& opts) {
    using thzloc::cli::OutputFormat;
    if (opts.out_path.empty()) {
        thzloc::cli::write_summary(rows, std::cout);
        return;
    }
    const auto format = opts.format == "json" ? OutputFormat::json : OutputFormat::csv;
    thzloc::cli::emit_results(rows, opts.out_path, format, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-way time-of-flight localization of energy-harvesting THz nanonodes"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    auto* run = app.add_subcommand("run", "simulate one configuration");
    add_common(*run, run_opts);

    CommonOptions sweep_opts;
    std::string sweep_path;
    auto* sweep = app.add_subcommand("sweep", "simulate every (value, seed) of a sweep spec");
    add_common(*sweep, sweep_opts);
    sweep->add_option("--sweep", sweep_path, "JSON sweep spec")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto config = resolve_config(run_opts);
            const auto report = thzloc::sim::run_simulation(config);
            finish({thzloc::cli::make_row("none", 0.0, config.rng_seed, report)}, run_opts);
        } else {
            const auto config = resolve_config(sweep_opts);
            const auto spec = thzloc::cli::load_sweep(sweep_path, config.rng_seed);
            finish(thzloc::cli::run_sweep(config, spec), sweep_opts);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
