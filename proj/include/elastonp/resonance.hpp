#pragma once

#include <functional>
#include <optional>
#include <variant>

#include "elastonp/analytic_spectra.hpp"

namespace elastonp {

/// Point dipole forcing A grad delta_z; rows of strength are a1^T, a2^T.
struct DipoleSource {
    Vec2 z;
    Mat2 strength;
};

/// F_z(x) = -((A grad_x)^T Gamma(x - z))^T.
Vec2 dipole_field(const LameParams& p, const DipoleSource& src, const Vec2& x);
/// Conormal derivative of F_z at x in direction n (closed form).
Vec2 dipole_traction(const LameParams& p, const DipoleSource& src, const Vec2& x, const Vec2& n);

/// Lossy spectral parameter (c + 1 + i delta) / (2 (c - 1 + i delta)).
Complex k_delta(double contrast, double loss);
/// Its delta -> 0 limit (c + 1) / (2 (c - 1)).
double k_limit(double contrast);
/// The contrast with k(c) = +k0 (sign >= 0) or -k0.
double contrast_for_accumulation(const LameParams& p, int sign);
/// The contrast with k(c) = k_target, |k_target| < 1/2.
double contrast_for_eigenvalue(double k_target);
/// Admissibility condition for CALR sources: a1 != U(-pi/2) a2.
bool calr_source_admissible(const DipoleSource& src);

/// Negative-stiffness inclusion problem: geometry (ellipse or disk radius),
/// contrast c < 0, dipole source. The loss parameter delta varies per solve.
struct CalrProblem {
    LameParams params;
    std::variant<EllipseGeometry, double> geometry;
    double contrast;
    DipoleSource source;
    int n_max = 0;     // spectral truncation; 0 selects ceil(|log d| / 2 rho0) + 20
    int n_nodes = 256; // direct-path discretization

    bool is_ellipse() const { return std::holds_alternative<EllipseGeometry>(geometry); }
    const EllipseGeometry& ellipse() const { return std::get<EllipseGeometry>(geometry); }
    double disk_radius() const { return std::get<double>(geometry); }
};

struct SpectralMode {
    int j, n;
    double eigenvalue;
    double alpha;    // (phi_hat_{j,n}, d_nu F)_*
    Complex coeff;   // alpha / (k_delta - k_{j,n})
};

struct CalrSolution {
    std::vector<SpectralMode> modes;  // spectral path only
    double energy = 0.0;              // E(u_delta - F) = E(S[phi_delta])
    int n_max_used = 0;
    bool truncation_ok = true;
    double condition_estimate = 0.0;  // direct path: 1 / rcond of the solve
    /// u_delta - F_z at exterior points (complex-valued displacement).
    std::function<Eigen::Vector2cd(const Vec2&)> scattered;
};

/// Coupling coefficients alpha_{j,n}(z) for the ellipse catalog.
std::vector<SpectralMode> spectral_coefficients(const CalrProblem& problem, int n_max);

/// Spectral solution through the closed-form catalog (ellipse only).
CalrSolution solve_spectral(const CalrProblem& problem, double loss);

/// Dense Nystrom solve of (k_delta I - K*) phi = d_nu F on the given curve.
CalrSolution solve_direct(const CalrProblem& problem, double loss, const DiscreteNP& np);

enum class SolveMethod { spectral, direct };

struct SweepRow {
    double loss;
    double energy;
    double delta_energy;
    int n_max_used;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    int log_power = 0;         // |log d| power divided out before the fit
    double fitted_exponent = 0.0;
    double fit_intercept = 0.0;
    double fit_rms = 0.0;
};

/// Energy across a loss sweep with a log-log fit of E / |log d|^log_power.
/// Requires at least 5 loss values.
SweepResult energy_sweep(const CalrProblem& problem, const std::vector<double>& losses,
                         int log_power, SolveMethod method,
                         const DiscreteNP* np = nullptr);

enum class CloakingVerdict {
    calr,                            // d E -> infinity and far field vanishes
    resonance_without_localization,  // d E -> infinity, far field does not vanish
    no_blowup,                       // d E -> 0
    inconclusive
};

struct CloakingReport {
    CloakingVerdict verdict = CloakingVerdict::inconclusive;
    double delta_energy_slope = 0.0;    // d log(dE) / d log d
    double per_decade_factor = 0.0;     // growth of dE per decade of shrinking d
    double farfield_slope = 0.0;        // d log v / d log d, v = |u - F| / (d E)
    bool delta_energy_monotone = false;
    std::vector<SweepRow> rows;
};

/// Trend report for delta * E and the normalized far field at sample points
/// on the curve rho = sample_rho (ellipse) or radius sample_rho (disk).
CloakingReport cloaking_verdict(const CalrProblem& problem, const std::vector<double>& losses,
                                double sample_rho, SolveMethod method,
                                const DiscreteNP* np = nullptr);

struct BoundednessReport {
    std::vector<double> sup_values;  // per loss
    double variation = 0.0;          // (max - min) / min
    bool within_10_percent = false;
};

/// sup over an omega grid at rho = sample_rho of |u_delta - F_z| across the
/// sweep. Rejects thresholds violating the boundedness hypotheses
/// (rho + rho_z - 4 rho0 > 0 at +k0, 6 rho0 at -k0). Ellipse only.
BoundednessReport boundedness_check(const CalrProblem& problem,
                                    const std::vector<double>& losses, double sample_rho,
                                    int n_omega_samples = 16);

struct FieldMapSpec {
    Vec2 lower, upper;  // box corners
    int nx = 64, ny = 64;
    double mask_radius_around_source = 0.1;
};

struct FieldMap {
    FieldMapSpec spec;
    MatX scattered_magnitude;  // |u - F|, ny x nx, masked entries = NaN
    MatX total_magnitude;      // |u|
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> masked;
};

FieldMap field_map(const CalrProblem& problem, double loss, const FieldMapSpec& spec,
                   SolveMethod method, const DiscreteNP* np = nullptr);

}  // namespace elastonp
