#pragma once

#include <span>

#include "elastonp/kernels.hpp"

namespace elastonp {

/// Dense Nystrom discretization of the layer operators on one curve.
/// Vectors are nodal, interleaved (node k occupies entries 2k, 2k+1).
/// Immutable after assembly.
struct DiscreteNP {
    LameParams params;
    BoundaryCurve curve;

    MatX single_layer;      // S_h
    MatX np;                // K_h, acts on traces
    MatX np_adjoint;        // K*_h, acts on densities
    MatX single_layer_psi;  // S~_h, rigid-motion-corrected single layer
    MatX gram;              // gram_star = -W S~_h, symmetrized, positive definite
    Eigen::LLT<MatX> gram_chol;

    MatX psi_basis;           // 2n x 3, duality-orthonormal rigid motion traces f^(j)
    Eigen::Matrix3d psi_coeff;  // columns: coefficients of f^(j) in the raw rigid motions
    MatX w_basis;             // 2n x 3, densities phi^(j) with K* phi = phi/2

    double gram_asymmetry = 0.0;         // pre-symmetrization relative asymmetry
    /// Relative Frobenius asymmetry of G K*_h measured on the de-aliased band
    /// (parameter modes <= 2/3 of Nyquist, where the discretization is
    /// spectrally consistent).
    double self_adjoint_asymmetry = 0.0;

    int size() const { return curve.size(); }

    /// Discrete duality pairing <a, b> = sum_k w_k a_k . b_k.
    double pairing(const VecX& a, const VecX& b) const;
    /// (a, b)_* = a^T gram b.
    double star_product(const VecX& a, const VecX& b) const;

    /// Rigid motion field f^(j) evaluated at an arbitrary point.
    Vec2 psi_field(int j, const Vec2& x) const;
};

/// Assembles S_h, K_h, K*_h, the W-basis and the gram matrix. The Cauchy part
/// uses the odd/even split-grid trapezoid rule, the log part of S_h the
/// periodic log-weight correction, bounded parts plain trapezoid with
/// coincidence limits. Throws std::runtime_error if the gram fails to be
/// positive definite.
DiscreteNP assemble(const LameParams& params, const BoundaryCurve& curve);

/// The three densities phi^(j): eigenvectors of K*_h at 1/2, biorthogonal to
/// the rigid-motion traces. Computed during assembly; re-exposed per the
/// module surface.
MatX build_w_basis(const DiscreteNP& np);

struct SpectrumResult {
    VecX eigenvalues;   // ascending
    MatX eigenvectors;  // gram-orthonormal columns (densities)
    int count_near_plus_k0 = 0;
    int count_near_minus_k0 = 0;
    double accumulation_window = 0.0;
    /// Tolerance used to identify the 1/2 eigenvalue cluster.
    double half_tolerance = 0.0;
    int half_multiplicity = 0;
};

/// Generalized symmetric eigendecomposition of K*_h with respect to gram_star
/// via Cholesky congruence.
SpectrumResult symmetrized_spectrum(const DiscreteNP& np, double accumulation_window = 1e-3);

/// || S~_h K*_h - K_h S~_h ||_F / || S~_h ||_F on the de-aliased band
/// (parameter modes <= 2/3 of Nyquist).
double plemelj_residual(const DiscreteNP& np);

/// Single layer potential of a nodal density at an off-surface point. The
/// density is trigonometrically interpolated and integrated on a refined grid
/// (upsample * n nodes) so that targets near the curve stay accurate.
Vec2 single_layer_offsurface(const DiscreteNP& np, const VecX& density, const Vec2& x,
                             int upsample = 8);

/// Conormal derivative of the same potential at x, in direction n_dir.
Vec2 single_layer_traction_offsurface(const DiscreteNP& np, const VecX& density, const Vec2& x,
                                      const Vec2& n_dir, int upsample = 8);

struct JumpReport {
    double max_error_plus = 0.0;   // vs (+1/2 I + K*_h) density
    double max_error_minus = 0.0;  // vs (-1/2 I + K*_h) density
    bool richardson_converged = true;
};

/// Off-surface check of the single-layer jump relations: one-sided tractions
/// at x +- t n extrapolated to t -> 0 and compared with (+-1/2 I + K*_h).
/// offsets must be 3 decreasing values with ratio 2.
JumpReport jump_relation_check(const DiscreteNP& np, const VecX& density,
                               std::span<const double> offsets);

/// Trigonometric interpolation of periodic nodal data (values at the curve's
/// equispaced parameters) to an arbitrary parameter.
class TrigInterpolant {
public:
    TrigInterpolant(const VecX& nodal, int n_nodes);  // nodal interleaved 2-vectors
    Vec2 operator()(double t) const;

private:
    int n_;
    MatX cos_coef_, sin_coef_;  // (n/2+1) x 2
};

}  // namespace elastonp
