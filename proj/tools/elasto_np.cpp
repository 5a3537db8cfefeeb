// Batch front end: structured config in, CSV/JSON artifacts out.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "elastonp/cli/runner.hpp"

using nlohmann::json;

namespace {
int fail_config(const elastonp::cli::ConfigError& e) {
    json err{{"error", {{"key", e.key}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << std::endl;
    return 2;
}

int fail_runtime(const std::exception& e) {
    json err{{"error", {{"key", ""}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << std::endl;
    return 1;
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"elasto-np: planar elastic NP spectra and anomalous resonance experiments"};
    app.require_subcommand(1);

    std::string config_path;
    elastonp::cli::RunOptions options;

    auto* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_option("--threads", options.threads, "worker threads for assembly");
    run->add_option("--out", options.out_dir_override, "output directory override");
    run->add_option("--seed", options.seed, "recorded in the manifest (property tests only)");

    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", config_path, "JSON config file")->required();

    CLI11_PARSE(app, argc, argv);

    json raw;
    try {
        std::ifstream in(config_path);
        if (!in)
            throw elastonp::cli::ConfigError("", "cannot open config file '" + config_path + "'");
        try {
            in >> raw;
        } catch (const json::parse_error& e) {
            throw elastonp::cli::ConfigError("", std::string("JSON parse error: ") + e.what());
        }
        const elastonp::cli::RunConfig config = elastonp::cli::parse_config(raw);
        if (app.got_subcommand(validate)) {
            std::cout << json{{"valid", true},
                              {"config_hash", elastonp::cli::config_hash(raw)}}
                             .dump(2)
                      << std::endl;
            return 0;
        }
        const json manifest = elastonp::cli::run_experiment(config, raw, options);
        std::cout << manifest.dump(2) << std::endl;
        return 0;
    } catch (const elastonp::cli::ConfigError& e) {
        return fail_config(e);
    } catch (const std::exception& e) {
        return fail_runtime(e);
    }
}
