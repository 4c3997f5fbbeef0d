/// @file carroll_cli.cpp
/// @brief Command-line front end: run, sweep-eps, entropy-audit, oracle-compare.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "carroll/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Viscous Carrollian fluid laboratory"};
    app.require_subcommand(1);

    carroll::experiment::CommandOptions opts;
    std::string output_dir;
    unsigned seed = 0;
    app.add_option("--output-dir", output_dir, "Override the config's output_dir");
    app.add_option("--threads", opts.threads, "Worker and OpenMP thread count")->check(CLI::NonNegativeNumber);
    auto* seed_opt = app.add_option("--seed", seed, "Override the config's seed");

    std::string config;
    for (const char* name : {"run", "sweep-eps", "entropy-audit", "oracle-compare"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("config", config, "Experiment config (JSON)")->required();
        // Global options are also accepted after the subcommand.
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }
    if (!output_dir.empty()) opts.output_dir = output_dir;
    if (*seed_opt) opts.seed = seed;
    const std::string command = app.get_subcommands().front()->get_name();
    return carroll::experiment::dispatch(command, config, opts, std::cerr);
}
