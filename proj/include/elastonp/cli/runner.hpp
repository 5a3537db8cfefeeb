#pragma once

#include <json.hpp>

#include "elastonp/cli/run_config.hpp"

namespace elastonp::cli {

struct RunOptions {
    std::string out_dir_override;  // empty = use the config's output.dir
    int threads = 0;               // 0 = library default
    unsigned seed = 0;             // recorded only; experiments are deterministic
};

/// Executes the experiment, writes the CSV artifacts and manifest.json to the
/// output directory, and returns the manifest. Throws ConfigError for config
/// problems and std::runtime_error for module failures.
nlohmann::json run_experiment(const RunConfig& config, const nlohmann::json& raw_config,
                              const RunOptions& options);

}  // namespace elastonp::cli
