#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "elastonp/resonance.hpp"

namespace elastonp::cli {

/// Config-level failure tagged with the offending key path.
struct ConfigError : std::runtime_error {
    std::string key;
    ConfigError(std::string key_, const std::string& message)
        : std::runtime_error(message), key(std::move(key_)) {}
};

enum class Experiment { spectrum, convergence, calr_energy, cloaking, field_map, expansion };

struct RunConfig {
    Experiment experiment = Experiment::spectrum;

    // geometry
    bool is_ellipse = true;
    std::optional<EllipseGeometry> ellipse;
    double disk_radius = 1.0;

    // material
    double lambda = 1.0;
    double mu = 1.0;
    std::optional<double> contrast;   // explicit value or via resonance tag
    int resonance_sign = 0;           // +1 / -1 when contrast given as "+k0" / "-k0"
    std::vector<double> deltas;
    int log_power = -1;               // -1 = derive from the resonance tag

    // source
    std::optional<Vec2> source_z;     // resolved Cartesian position
    Mat2 source_strength = Mat2::Identity();

    // discretization
    int n_nodes = 256;
    int n_max = 0;
    int table_n_max = 8;              // spectrum table depth

    // experiment extras
    double sample_rho_over_rho0 = 4.0;   // cloaking / boundedness samples
    struct Grid {
        double x0 = -4.0, x1 = 4.0, y0 = -3.0, y1 = 3.0;
        int nx = 64, ny = 64;
    } grid;
    struct ExpansionSpec {
        double x_rho_over_rho0 = 2.0;
        double x_omega = 0.7;
        double y_x = 0.0, y_y = 0.0;
        int n_trunc = 40;
    } expansion;

    std::string out_dir = "out";

    LameParams material() const { return LameParams(lambda, mu); }
    double resolved_contrast() const;
    CalrProblem calr_problem() const;
};

/// Parses and validates; throws ConfigError naming the offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Canonical serialization used for the manifest hash.
std::string canonical_dump(const nlohmann::json& j);
/// FNV-1a 64-bit hash, hex encoded.
std::string config_hash(const nlohmann::json& j);

}  // namespace elastonp::cli
