#include "geoflow/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Harmonic map heat flow of closed curves, sweepout tightening and width estimates"};
    app.require_subcommand(1);

    geoflow::cli::CommandOptions options;
    std::string config;
    std::string out_dir;
    std::size_t resolution = 0;
    std::uint64_t seed = 0;

    const std::pair<const char*, const char*> commands[] = {
        {"flow", "Run the flow from one curve"},
        {"tighten", "Tighten a sweepout through the schedule"},
        {"width", "Estimate the width and audit the near-maximal slices"},
        {"audit", "Compare a curve or the near-maximal slices of a sweepout with known geodesics"},
        {"validate", "Check a config without computing anything"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out-dir", out_dir, "Output directory (overrides the config)");
        sub->add_option("--resolution", resolution, "Points per curve (overrides the config)")->check(CLI::Range(8, 1 << 24));
        sub->add_option("--seed", seed, "Random seed (overrides the config)");
        sub->add_flag("--quiet", options.quiet, "Only report errors");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : geoflow::cli::kExitConfig;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    options.config = config;
    if (chosen->count("--out-dir") > 0) options.out_dir = out_dir;
    if (chosen->count("--resolution") > 0) options.resolution = resolution;
    if (chosen->count("--seed") > 0) options.seed = seed;
    return geoflow::cli::run_command(chosen->get_name(), options, std::cout, std::cerr);
}
