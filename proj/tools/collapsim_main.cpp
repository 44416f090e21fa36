#include "collapsim/config.hpp"
#include "collapsim/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace collapsim;

struct CommonOpts {
    std::string config_path;
    long seed = -1; // -1: take from file / default
    std::string out_dir;
    std::string format;
};

cli::ExperimentConfig load(const std::string& experiment, const CommonOpts& opts) {
    auto pairs = cli::parse_config_file(opts.config_path);
    cli::ExperimentConfig cfg = cli::make_config(experiment, std::move(pairs));
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (!opts.format.empty()) cfg.format = opts.format;
    return cfg;
}

int run(const std::string& experiment, const CommonOpts& opts) {
    cli::ExperimentConfig cfg = load(experiment, opts);
    cli::RunReport rep = cli::run_experiment(cfg);
    std::printf("%s: wrote %zu series file(s) + %s under %s (%.3f s)\n",
                cfg.experiment.c_str(), rep.series_files.size(), rep.report_file.c_str(),
                cfg.out_dir.c_str(), rep.wall_time_seconds);
    return 0;
}

int validate(const CommonOpts& opts) {
    cli::ExperimentConfig cfg = load("", opts);
    auto diags = cli::validate_config(cfg);
    for (const auto& d : diags) std::printf("%s\n", d.c_str());
    if (diags.empty()) {
        std::printf("ok: %s config is valid\n", cfg.experiment.c_str());
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"collapsim - collapse-model experiments"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string picked;

    auto add_common = [&](CLI::App* sub, bool with_run_opts) {
        sub->add_option("--config", opts.config_path, "experiment config file")->required();
        if (with_run_opts) {
            sub->add_option("--seed", opts.seed, "override the master seed");
            sub->add_option("--out", opts.out_dir, "output directory");
            sub->add_option("--format", opts.format, "series format: csv | json")
                ->check(CLI::IsMember({"csv", "json"}));
        }
    };

    for (const auto& name : cli::known_experiments()) {
        CLI::App* sub = app.add_subcommand(name, name + " experiment");
        add_common(sub, true);
        sub->callback([&picked, name] { picked = name; });
    }
    CLI::App* val = app.add_subcommand("validate", "check a config without running it");
    add_common(val, false);
    val->callback([&picked] { picked = "validate"; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (picked == "validate") return validate(opts);
        return run(picked, opts);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 4;
    }
}
