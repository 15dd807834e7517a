#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "latfront/commands.hpp"
#include "latfront/config.hpp"
#include "latfront/errors.hpp"
#include "latfront/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"latfront — KPP lattice equations in random time-dependent media: "
                 "front construction, speed calculus, and verification suites"};
    app.set_version_flag("--version", latfront::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 1;
    std::optional<std::uint64_t> seed_override;

    const std::vector<std::string> names = {"speedscan", "envelope", "front",    "stability",
                                            "spreading", "validate", "simulate"};
    const std::vector<std::string> blurbs = {
        "envelope curve, minimizer, minimal speed, and two-root inversions",
        "super/sub-solution field with discrete residuals on a configured window",
        "back-propagated transition front, convergence ladder, tail and stationarity reports",
        "perturbed front two-sided ratio report (alpha series)",
        "flank speeds of compactly supported data against the minimal speed",
        "property suite: comparison, logistic oracle, equilibrium decay, envelope residuals",
        "raw evolution of a configured initial profile"};

    for (std::size_t i = 0; i < names.size(); ++i) {
        auto* sub = app.add_subcommand(names[i], blurbs[i]);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_dir, "output directory (default: from config)");
        sub->add_option("--threads", threads, "worker threads for ensemble members");
        sub->add_option("--seed-override", seed_override, "replace the config seed set");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    latfront::Config cfg;
    try {
        cfg = latfront::load_config(config_path);
    } catch (const latfront::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    latfront::RunOptions opt;
    opt.outdir = out_dir.empty() ? std::filesystem::path(cfg.output_dir) / cmd
                                 : std::filesystem::path(out_dir);
    opt.threads = threads;
    opt.seed_override = seed_override;
    return latfront::run_command(cmd, cfg, opt);
}
