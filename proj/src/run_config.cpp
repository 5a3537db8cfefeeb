#include "elastonp/cli/run_config.hpp"

#include <fstream>

#include <json.hpp>

namespace elastonp::cli {

using nlohmann::json;

namespace {
const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path, "missing required key");
    return j.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<int>();
}
}  // namespace

double RunConfig::resolved_contrast() const {
    if (resonance_sign != 0) return contrast_for_accumulation(material(), resonance_sign);
    if (!contrast) throw ConfigError("material.contrast", "contrast required for this experiment");
    return *contrast;
}

CalrProblem RunConfig::calr_problem() const {
    if (!source_z) throw ConfigError("source.z", "source required for this experiment");
    CalrProblem prob{material(),
                     is_ellipse ? std::variant<EllipseGeometry, double>(*ellipse)
                                : std::variant<EllipseGeometry, double>(disk_radius),
                     resolved_contrast(),
                     DipoleSource{*source_z, source_strength},
                     n_max,
                     n_nodes};
    return prob;
}

RunConfig parse_config(const json& j) {
    RunConfig c;
    if (!j.is_object()) throw ConfigError("", "config must be a JSON object");

    const std::string kind = require(j, "experiment", "experiment").get<std::string>();
    if (kind == "spectrum") c.experiment = Experiment::spectrum;
    else if (kind == "convergence") c.experiment = Experiment::convergence;
    else if (kind == "calr-energy") c.experiment = Experiment::calr_energy;
    else if (kind == "cloaking") c.experiment = Experiment::cloaking;
    else if (kind == "field-map") c.experiment = Experiment::field_map;
    else if (kind == "expansion") c.experiment = Experiment::expansion;
    else throw ConfigError("experiment", "unknown experiment kind '" + kind + "'");

    // --- geometry ---
    const json& g = require(j, "geometry", "geometry");
    const std::string gk = require(g, "kind", "geometry.kind").get<std::string>();
    if (gk == "ellipse") {
        c.is_ellipse = true;
        const double a = number(require(g, "a", "geometry.a"), "geometry.a");
        const double b = number(require(g, "b", "geometry.b"), "geometry.b");
        try {
            c.ellipse = EllipseGeometry(a, b);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("geometry", e.what());
        }
    } else if (gk == "disk") {
        c.is_ellipse = false;
        c.disk_radius = number(require(g, "radius", "geometry.radius"), "geometry.radius");
        if (!(c.disk_radius > 0.0)) throw ConfigError("geometry.radius", "must be positive");
    } else {
        throw ConfigError("geometry.kind", "expected 'ellipse' or 'disk'");
    }

    // --- material ---
    const json& m = require(j, "material", "material");
    c.lambda = number(require(m, "lambda", "material.lambda"), "material.lambda");
    c.mu = number(require(m, "mu", "material.mu"), "material.mu");
    try {
        (void)c.material();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("material.mu", e.what());
    }
    if (m.contains("contrast")) {
        const json& ct = m.at("contrast");
        if (ct.is_number()) {
            c.contrast = ct.get<double>();
            if (*c.contrast == 1.0) throw ConfigError("material.contrast", "c = 1 is singular");
        } else if (ct.is_object() && ct.contains("resonance")) {
            const std::string tag = ct.at("resonance").get<std::string>();
            if (tag == "+k0") c.resonance_sign = +1;
            else if (tag == "-k0") c.resonance_sign = -1;
            else throw ConfigError("material.contrast.resonance", "expected '+k0' or '-k0'");
        } else {
            throw ConfigError("material.contrast", "expected a number or {\"resonance\": ...}");
        }
    }
    if (m.contains("deltas")) {
        const json& ds = m.at("deltas");
        if (!ds.is_array()) throw ConfigError("material.deltas", "expected an array");
        for (const auto& d : ds) {
            const double v = number(d, "material.deltas");
            if (!(v > 0.0)) throw ConfigError("material.deltas", "loss values must be positive");
            c.deltas.push_back(v);
        }
    }
    if (m.contains("log_power")) c.log_power = integer(m.at("log_power"), "material.log_power");

    // --- source ---
    if (j.contains("source")) {
        const json& s = j.at("source");
        const json& z = require(s, "z", "source.z");
        if (z.contains("rho_over_rho0")) {
            if (!c.is_ellipse)
                throw ConfigError("source.z.rho_over_rho0",
                                  "elliptic source coordinates need an ellipse");
            const double rr = number(z.at("rho_over_rho0"), "source.z.rho_over_rho0");
            if (!(rr > 1.0))
                throw ConfigError("source.z.rho_over_rho0", "source must be strictly exterior");
            const double om = z.contains("omega") ? number(z.at("omega"), "source.z.omega") : 0.0;
            c.source_z = elliptic_to_cartesian(*c.ellipse, rr * c.ellipse->rho0, om);
        } else if (z.contains("x") && z.contains("y")) {
            c.source_z = Vec2(number(z.at("x"), "source.z.x"), number(z.at("y"), "source.z.y"));
        } else {
            throw ConfigError("source.z", "expected {rho_over_rho0, omega} or {x, y}");
        }
        if (s.contains("strength")) {
            const json& a = s.at("strength");
            if (!a.is_array() || a.size() != 2 || !a[0].is_array() || a[0].size() != 2 ||
                !a[1].is_array() || a[1].size() != 2)
                throw ConfigError("source.strength", "expected a 2x2 array");
            for (int r = 0; r < 2; ++r)
                for (int cidx = 0; cidx < 2; ++cidx)
                    c.source_strength(r, cidx) = number(a[r][cidx], "source.strength");
        }
    }

    // --- discretization ---
    if (j.contains("discretization")) {
        const json& d = j.at("discretization");
        if (d.contains("n_nodes")) {
            c.n_nodes = integer(d.at("n_nodes"), "discretization.n_nodes");
            if (c.n_nodes < 16 || c.n_nodes % 2 != 0)
                throw ConfigError("discretization.n_nodes", "must be even and >= 16");
        }
        if (d.contains("n_max")) {
            c.n_max = integer(d.at("n_max"), "discretization.n_max");
            if (c.n_max < 0) throw ConfigError("discretization.n_max", "must be >= 0");
        }
        if (d.contains("table_n_max")) {
            c.table_n_max = integer(d.at("table_n_max"), "discretization.table_n_max");
            if (c.table_n_max < 1) throw ConfigError("discretization.table_n_max", "must be >= 1");
        }
    }

    // --- experiment extras ---
    if (j.contains("sample_rho_over_rho0")) {
        c.sample_rho_over_rho0 = number(j.at("sample_rho_over_rho0"), "sample_rho_over_rho0");
        if (!(c.sample_rho_over_rho0 > 1.0))
            throw ConfigError("sample_rho_over_rho0", "samples must be exterior");
    }
    if (j.contains("grid")) {
        const json& gr = j.at("grid");
        auto num = [&](const char* k, double& dst) {
            if (gr.contains(k)) dst = number(gr.at(k), std::string("grid.") + k);
        };
        num("x0", c.grid.x0);
        num("x1", c.grid.x1);
        num("y0", c.grid.y0);
        num("y1", c.grid.y1);
        if (gr.contains("nx")) c.grid.nx = integer(gr.at("nx"), "grid.nx");
        if (gr.contains("ny")) c.grid.ny = integer(gr.at("ny"), "grid.ny");
        if (c.grid.nx < 2 || c.grid.ny < 2) throw ConfigError("grid", "nx, ny must be >= 2");
        if (!(c.grid.x1 > c.grid.x0) || !(c.grid.y1 > c.grid.y0))
            throw ConfigError("grid", "box corners must be ordered");
    }
    if (j.contains("expansion")) {
        const json& e = j.at("expansion");
        auto num = [&](const char* k, double& dst) {
            if (e.contains(k)) dst = number(e.at(k), std::string("expansion.") + k);
        };
        num("x_rho_over_rho0", c.expansion.x_rho_over_rho0);
        num("x_omega", c.expansion.x_omega);
        num("y_x", c.expansion.y_x);
        num("y_y", c.expansion.y_y);
        if (e.contains("n_trunc")) c.expansion.n_trunc = integer(e.at("n_trunc"), "expansion.n_trunc");
        if (c.expansion.n_trunc < 1) throw ConfigError("expansion.n_trunc", "must be >= 1");
        if (!(c.expansion.x_rho_over_rho0 > 1.0))
            throw ConfigError("expansion.x_rho_over_rho0", "x must be exterior");
    }
    if (j.contains("output") && j.at("output").contains("dir"))
        c.out_dir = j.at("output").at("dir").get<std::string>();

    // --- per-experiment requirements ---
    switch (c.experiment) {
        case Experiment::spectrum:
        case Experiment::convergence:
            break;
        case Experiment::calr_energy:
        case Experiment::cloaking:
            if (c.deltas.size() < (c.experiment == Experiment::cloaking ? 3u : 5u))
                throw ConfigError("material.deltas", "loss sweep too short");
            [[fallthrough]];
        case Experiment::field_map:
            if (!c.source_z) throw ConfigError("source.z", "source required");
            if (!c.contrast && c.resonance_sign == 0)
                throw ConfigError("material.contrast", "contrast required");
            if (c.experiment == Experiment::field_map && c.deltas.size() != 1)
                throw ConfigError("material.deltas", "field-map needs exactly one loss value");
            break;
        case Experiment::expansion:
            if (!c.is_ellipse) throw ConfigError("geometry.kind", "expansion needs an ellipse");
            break;
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("JSON parse error: ") + e.what());
    }
    return parse_config(j);
}

std::string canonical_dump(const json& j) { return j.dump(-1, ' ', true); }

std::string config_hash(const json& j) {
    const std::string s = canonical_dump(j);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace elastonp::cli
