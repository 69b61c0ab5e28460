#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Sparse MIMO FMCW radar: range/angle detection experiments"};
    app.require_subcommand(1);

    std::string config_path;
    mimo::cli::Overrides overrides;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t jobs = 0;

    for (const auto& [name, help] : {std::pair{"sweep", "Monte Carlo hit/false-alarm/RMSE sweep over SNR"},
                                     std::pair{"close-targets", "Spectra for the three close-range targets"},
                                     std::pair{"single", "One seeded trial: truth, estimates and hit classification"},
                                     std::pair{"calibrate", "Constant false-alarm threshold calibration"}}) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON config or run manifest")->required();
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--seed", seed, "Master seed");
        sub->add_option("--jobs", jobs, "Worker threads for trials")->check(CLI::PositiveNumber);
        sub->add_flag("--plots", overrides.plots, "Also write SVG charts");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--out")) overrides.out_dir = out_dir;
    if (sub->count("--seed")) overrides.seed = seed;
    if (sub->count("--jobs")) overrides.jobs = jobs;
    return mimo::cli::run_command(sub->get_name(), config_path, overrides, std::cout, std::cerr);
}
