#include "elastonp/cli/runner.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace elastonp::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    // scientific, 17 significant digits
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

struct CsvWriter {
    std::ofstream out;
    CsvWriter(const std::filesystem::path& path, const std::string& hash,
              const std::string& columns) {
        out.open(path);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << "# units=dimensionless config_hash=" << hash << "\n";
        out << columns << "\n";
    }
    template <typename... Ts>
    void row(Ts... fields) {
        bool first = true;
        ((out << (first ? "" : ","), first = false, write(fields)), ...);
        out << "\n";
    }

private:
    void write(double v) { out << fmt(v); }
    void write(int v) { out << v; }
    void write(const std::string& s) { out << s; }
};

// Greedy nearest matching of analytic values against the discrete spectrum,
// one discrete eigenvalue per analytic entry, 1e-3 acceptance gate.
std::vector<std::pair<double, bool>> match_values(const std::vector<double>& targets,
                                                  const VecX& eigenvalues) {
    std::vector<bool> used(eigenvalues.size(), false);
    std::vector<std::pair<double, bool>> out;
    for (double t : targets) {
        int best = -1;
        double bestd = 1e300;
        for (int i = 0; i < eigenvalues.size(); ++i) {
            if (used[i]) continue;
            const double d = std::abs(eigenvalues[i] - t);
            if (d < bestd) {
                bestd = d;
                best = i;
            }
        }
        if (best >= 0 && bestd <= 1e-3) {
            used[best] = true;
            out.emplace_back(eigenvalues[best], true);
        } else {
            out.emplace_back(std::numeric_limits<double>::quiet_NaN(), false);
        }
    }
    return out;
}

json run_spectrum(const RunConfig& c, const std::filesystem::path& dir,
                  const std::string& hash) {
    const LameParams p = c.material();
    json fitted;
    CsvWriter csv(dir / "spectrum.csv", hash, "j,n,k_analytic,k_numeric,abs_err");
    if (c.is_ellipse) {
        auto np = assemble(p, make_ellipse_curve(*c.ellipse, c.n_nodes));
        const auto spec = symmetrized_spectrum(np);
        const EllipseSpectrum cat(p, *c.ellipse);
        const auto table = cat.eigenvalue_table(c.table_n_max);
        std::vector<double> targets;
        for (const auto& e : table) targets.push_back(e.value);
        const auto matched = match_values(targets, spec.eigenvalues);
        double max_err = 0.0;
        int unmatched = 0;
        for (size_t i = 0; i < table.size(); ++i) {
            const double err = matched[i].second
                                   ? std::abs(matched[i].first - table[i].value)
                                   : std::numeric_limits<double>::quiet_NaN();
            if (matched[i].second)
                max_err = std::max(max_err, err);
            else
                ++unmatched;
            csv.row(table[i].j, table[i].n, table[i].value, matched[i].first, err);
        }
        fitted["max_matched_error"] = max_err;
        fitted["unmatched"] = unmatched;
        fitted["half_multiplicity"] = spec.half_multiplicity;
    } else {
        auto np = assemble(p, make_disk_curve(c.disk_radius, c.n_nodes));
        const auto spec = symmetrized_spectrum(np);
        const auto cat = disk_spectrum(p, c.disk_radius);
        const std::vector<double> targets{cat.rigid_eigenvalue(), cat.radial_eigenvalue(),
                                          cat.accumulation(+1), cat.accumulation(-1)};
        const auto matched = match_values(targets, spec.eigenvalues);
        double max_err = 0.0;
        for (size_t i = 0; i < targets.size(); ++i) {
            const double err = matched[i].second
                                   ? std::abs(matched[i].first - targets[i])
                                   : std::numeric_limits<double>::quiet_NaN();
            max_err = std::max(max_err, err);
            csv.row(0, static_cast<int>(i), targets[i], matched[i].first, err);
        }
        fitted["max_matched_error"] = max_err;
        fitted["half_multiplicity"] = spec.half_multiplicity;
        fitted["near_plus_k0"] = spec.count_near_plus_k0;
        fitted["near_minus_k0"] = spec.count_near_minus_k0;
    }
    return fitted;
}

json run_convergence(const RunConfig& c, const std::filesystem::path& dir,
                     const std::string& hash) {
    const LameParams p = c.material();
    CsvWriter csv(dir / "convergence.csv", hash,
                  "n_nodes,plemelj_residual,self_adjoint_asymmetry,max_spectrum_err");
    json fitted = json::array();
    for (int n = 32; n <= c.n_nodes; n *= 2) {
        auto np = c.is_ellipse ? assemble(p, make_ellipse_curve(*c.ellipse, n))
                               : assemble(p, make_disk_curve(c.disk_radius, n));
        const double pl = plemelj_residual(np);
        double spec_err = std::numeric_limits<double>::quiet_NaN();
        if (c.is_ellipse) {
            const auto spec = symmetrized_spectrum(np);
            const EllipseSpectrum cat(p, *c.ellipse);
            const auto table = cat.eigenvalue_table(std::min(c.table_n_max, n / 8));
            std::vector<double> targets;
            for (const auto& e : table) targets.push_back(e.value);
            const auto matched = match_values(targets, spec.eigenvalues);
            spec_err = 0.0;
            for (size_t i = 0; i < targets.size(); ++i)
                if (matched[i].second)
                    spec_err = std::max(spec_err, std::abs(matched[i].first - targets[i]));
        }
        csv.row(n, pl, np.self_adjoint_asymmetry, spec_err);
        fitted.push_back({{"n_nodes", n}, {"plemelj", pl}});
    }
    return json{{"levels", fitted}};
}

json run_calr_energy(const RunConfig& c, const std::filesystem::path& dir,
                     const std::string& hash) {
    CalrProblem prob = c.calr_problem();
    int log_power = c.log_power;
    if (log_power < 0) {
        log_power = c.resonance_sign == +1 ? 1 : (c.resonance_sign == -1 ? 3 : 0);
        if (!c.is_ellipse) log_power = 0;  // disk resonance at an eigenvalue
    }
    std::vector<double> losses = c.deltas;
    std::sort(losses.begin(), losses.end(), std::greater<>());
    const SolveMethod method = c.is_ellipse ? SolveMethod::spectral : SolveMethod::direct;
    const SweepResult sweep = energy_sweep(prob, losses, log_power, method);

    CsvWriter csv(dir / "calr_energy.csv", hash, "delta,E,deltaE,n_max_used,fit_residual");
    for (const auto& r : sweep.rows) {
        const double pred = sweep.fit_intercept + sweep.fitted_exponent * std::log(r.loss);
        const double resid = std::log(r.energy) -
                             sweep.log_power * std::log(std::abs(std::log(r.loss))) - pred;
        csv.row(r.loss, r.energy, r.delta_energy, r.n_max_used, resid);
    }
    return json{{"fitted_exponent", sweep.fitted_exponent},
                {"fit_rms", sweep.fit_rms},
                {"log_power_removed", sweep.log_power}};
}

json run_cloaking(const RunConfig& c, const std::filesystem::path& dir,
                  const std::string& hash) {
    CalrProblem prob = c.calr_problem();
    std::vector<double> losses = c.deltas;
    std::sort(losses.begin(), losses.end(), std::greater<>());
    const SolveMethod method = c.is_ellipse ? SolveMethod::spectral : SolveMethod::direct;
    const double sample_rho = c.is_ellipse ? c.sample_rho_over_rho0 * c.ellipse->rho0
                                           : c.sample_rho_over_rho0 * c.disk_radius;
    const CloakingReport rep = cloaking_verdict(prob, losses, sample_rho, method);

    CsvWriter csv(dir / "cloaking.csv", hash, "delta,E,deltaE");
    for (const auto& r : rep.rows) csv.row(r.loss, r.energy, r.delta_energy);

    std::string verdict;
    switch (rep.verdict) {
        case CloakingVerdict::calr: verdict = "calr"; break;
        case CloakingVerdict::resonance_without_localization:
            verdict = "resonance_without_localization";
            break;
        case CloakingVerdict::no_blowup: verdict = "no_blowup"; break;
        default: verdict = "inconclusive";
    }
    return json{{"verdict", verdict},
                {"delta_energy_slope", rep.delta_energy_slope},
                {"per_decade_factor", rep.per_decade_factor},
                {"farfield_slope", rep.farfield_slope},
                {"delta_energy_monotone", rep.delta_energy_monotone}};
}

json run_field_map(const RunConfig& c, const std::filesystem::path& dir,
                   const std::string& hash) {
    CalrProblem prob = c.calr_problem();
    FieldMapSpec spec;
    spec.lower = Vec2(c.grid.x0, c.grid.y0);
    spec.upper = Vec2(c.grid.x1, c.grid.y1);
    spec.nx = c.grid.nx;
    spec.ny = c.grid.ny;
    const SolveMethod method = c.is_ellipse ? SolveMethod::spectral : SolveMethod::direct;
    const FieldMap map = field_map(prob, c.deltas[0], spec, method);

    CsvWriter csv(dir / "field_map.csv", hash, "x,y,abs_u_minus_F,abs_u,masked");
    for (int iy = 0; iy < spec.ny; ++iy) {
        for (int ix = 0; ix < spec.nx; ++ix) {
            const double fx = static_cast<double>(ix) / (spec.nx - 1);
            const double fy = static_cast<double>(iy) / (spec.ny - 1);
            const double x = c.grid.x0 + fx * (c.grid.x1 - c.grid.x0);
            const double y = c.grid.y0 + fy * (c.grid.y1 - c.grid.y0);
            csv.row(x, y, map.scattered_magnitude(iy, ix), map.total_magnitude(iy, ix),
                    map.masked(iy, ix) ? 1 : 0);
        }
    }
    return json{{"loss", c.deltas[0]}};
}

json run_expansion(const RunConfig& c, const std::filesystem::path& dir,
                   const std::string& hash) {
    const EllipseSpectrum spec(c.material(), *c.ellipse);
    const KelvinExpansion exp2d(spec, c.n_nodes);
    const Vec2 x = elliptic_to_cartesian(*c.ellipse,
                                         c.expansion.x_rho_over_rho0 * c.ellipse->rho0,
                                         c.expansion.x_omega);
    const Vec2 y(c.expansion.y_x, c.expansion.y_y);

    CsvWriter csv(dir / "expansion.csv", hash, "n_trunc,max_entry_error");
    std::vector<double> nv, lv;
    for (int n = 2; n <= c.expansion.n_trunc; n += 2) {
        const double err = exp2d.error(x, y, n);
        csv.row(n, err);
        if (err > 1e-15) {
            nv.push_back(n);
            lv.push_back(std::log(err));
        }
    }
    json fitted{{"final_error", exp2d.error(x, y, c.expansion.n_trunc)}};
    if (nv.size() >= 3) {
        VecX vx = Eigen::Map<VecX>(nv.data(), nv.size());
        VecX vy = Eigen::Map<VecX>(lv.data(), lv.size());
        fitted["tail_log_ratio"] = fit_line(vx, vy).slope;
    }
    return fitted;
}

}  // namespace

json run_experiment(const RunConfig& config, const json& raw_config, const RunOptions& options) {
    if (options.threads > 0) set_thread_count(options.threads);
    const std::string dir_name =
        options.out_dir_override.empty() ? config.out_dir : options.out_dir_override;
    const std::filesystem::path dir(dir_name);
    std::filesystem::create_directories(dir);
    const std::string hash = config_hash(raw_config);

    json fitted;
    switch (config.experiment) {
        case Experiment::spectrum: fitted = run_spectrum(config, dir, hash); break;
        case Experiment::convergence: fitted = run_convergence(config, dir, hash); break;
        case Experiment::calr_energy: fitted = run_calr_energy(config, dir, hash); break;
        case Experiment::cloaking: fitted = run_cloaking(config, dir, hash); break;
        case Experiment::field_map: fitted = run_field_map(config, dir, hash); break;
        case Experiment::expansion: fitted = run_expansion(config, dir, hash); break;
    }

    json manifest{{"config_hash", hash},
                  {"catalog_version", "1"},
                  {"experiment", json::parse(canonical_dump(raw_config)).at("experiment")},
                  {"fitted", fitted},
                  {"seed", options.seed},
                  {"threads", thread_count()}};
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
    return manifest;
}

}  // namespace elastonp::cli
