#pragma once

#include <vector>

#include "elastonp/discrete_np.hpp"

namespace elastonp {

/// Closed-form NP spectrum on a disk: eigenvalues 1/2 (rigid motions),
/// -lambda/(2(2mu+lambda)) (the radial mode), and +-k0 with infinite
/// multiplicity. Eigenfunction evaluators are not normalized.
struct DiskSpectrum {
    LameParams params;
    double radius;

    double rigid_eigenvalue() const { return 0.5; }
    double radial_eigenvalue() const {
        return -params.lambda / (2.0 * (2.0 * params.mu + params.lambda));
    }
    double accumulation(int sign) const { return sign >= 0 ? params.k0() : -params.k0(); }
    /// True when lambda == mu, where the radial eigenvalue merges into -k0.
    bool radial_merges_with_minus_k0() const {
        return radial_eigenvalue() == -params.k0();
    }

    enum class Mode {
        rigid_tx, rigid_ty, rigid_rot,  // eigenvalue 1/2
        radial,                         // -lambda/(2(2mu+lambda)), density (x,y)
        plus_cos, plus_rot,             // +k0, m >= 2
        minus_cos, minus_rot            // -k0, m >= 1
    };
    /// Density evaluator at polar angle theta. m is ignored for the rigid and
    /// radial families.
    Vec2 eigenfunction(Mode mode, int m, double theta) const;
};

DiskSpectrum disk_spectrum(const LameParams& params, double radius);

/// Closed-form NP spectrum and exterior single-layer fields on an ellipse.
/// Family indices j = 1..4; k_{1,n}, k_{2,n} accumulate at +k0 and k_{3,n},
/// k_{4,n} at -k0. All large-n evaluations use forms scaled by e^{-2 n rho0},
/// so no index overflows.
class EllipseSpectrum {
public:
    EllipseSpectrum(const LameParams& params, const EllipseGeometry& geom);

    const LameParams& params() const { return params_; }
    const EllipseGeometry& geometry() const { return geom_; }

    double q() const { return q_; }
    double pn(int n) const;
    /// e^{-2 n rho0} * gamma_n^{sign}.
    double gamma_scaled(int n, int sign) const;

    /// Raw closed-form k_{j,n}; defined for (j,n) in the catalog ranges and
    /// additionally for (2,1), where it evaluates to 1/2 exactly.
    double raw_eigenvalue(int j, int n) const;
    /// Signed distance to the accumulation value, cancellation-free:
    /// k_{j,n} - k0 for j = 1,2 and k_{j,n} + k0 for j = 3,4. Exact down to
    /// subnormal scales, unlike the difference of raw values.
    double accumulation_gap(int j, int n) const;
    /// Catalog eigenvalue; (2,1) is rejected (it belongs to the 1/2 family).
    double eigenvalue(int j, int n) const;
    /// k_{j,n} for j=1..4 and n = 1..n_max ((2,1) reported as 1/2).
    struct Entry { int j, n; double value; };
    std::vector<Entry> eigenvalue_table(int n_max) const;

    /// 2x2 action of the adjoint NP operator on the coefficient pairs
    /// (psi_1, psi_3) and (psi_2, psi_4).
    Mat2 transfer_matrix_13(int n) const;
    Mat2 transfer_matrix_24(int n) const;

    /// Basis density psi_{j,n}(omega) (the 1/h0-weighted trigonometric pair).
    Vec2 basis_density(int j, int n, double omega) const;
    /// Coefficients (c_low, c_high) of phi_{j,n} in the (psi_{j0,n}, psi_{j0+2,n})
    /// frame, j0 = 1 or 2.
    Eigen::Vector2d eigen_coeffs(int j, int n) const;
    Vec2 eigen_density(int j, int n, double omega) const;
    /// The three 1/2-eigenfunctions (i = 0,1,2).
    Vec2 half_eigenfunction(int i, double omega) const;

    /// Exact squared star-norms and cross products.
    double basis_norm2(int j, int n) const;
    /// (psi_{1,n}, psi_{3,n})_* = (psi_{2,n}, psi_{4,n})_*.
    double basis_cross(int n) const;
    double eigen_norm2(int j, int n) const;
    /// (phi_{1,n}, phi_{3,n})_* or (phi_{2,n}, phi_{4,n})_* per pair = 0 or 1.
    double eigen_cross(int pair, int n) const;

    /// Exterior single layer S[psi_{j,n}] at elliptic (rho, omega), rho >= rho0.
    /// Throws std::domain_error for interior points.
    Vec2 single_layer_basis(int j, int n, double rho, double omega) const;
    Vec2 single_layer_eigen(int j, int n, double rho, double omega) const;
    Vec2 single_layer_eigen_cart(int j, int n, const Vec2& x) const;

    /// Jacobian of the exterior field: row k holds the Cartesian gradient of
    /// component k of S[psi_{j,n}].
    Mat2 grad_single_layer_basis(int j, int n, double rho, double omega) const;

    /// Exact coupling (A grad)^T S[psi_{j,n}](z) by analytic differentiation
    /// of the closed forms; rows of A are a1^T, a2^T.
    double coupling_exact_basis(int j, int n, const Mat2& a, double rho, double omega) const;
    /// Leading-order coupling.
    double coupling_leading_basis(int j, int n, const Mat2& a, double rho, double omega) const;
    /// Exact coupling for the eigen-density phi_{j,n}.
    double coupling_exact_eigen(int j, int n, const Mat2& a, double rho, double omega) const;

    Mat2 u_tilde(double rho, double omega) const;
    double u_tilde_det(double rho, double omega) const;

private:
    struct Term {
        Complex coeff;  // includes the e^{a rho0} shift, bounded for all n
        double arho;    // exponent of e^{a (rho - rho0)}
        int bnu;        // angular frequency
        int upow;       // power of u = R^2 / h^2
    };
    std::vector<Term> field_terms(int j, int n) const;
    Complex eval_terms(const std::vector<Term>& terms, double rho, double omega) const;
    void eval_terms_grad(const std::vector<Term>& terms, double rho, double omega,
                         Complex& val, Complex& drho, Complex& dnu) const;
    void check_exterior(double rho) const;

    LameParams params_;
    EllipseGeometry geom_;
    double q_;
};

/// Spectral reconstruction of the Kelvin matrix
///   Gamma(x - y) = -sum_j S[phi_hat_j](x) S[phi_hat_j](y)^T + rank-3 W term,
/// x exterior, y in the closed inclusion. The eigen-pairs are orthonormalized
/// through their exact 2x2 star-gram; the W term uses the discrete 1/2-eigen
/// basis and off-surface quadrature.
class KelvinExpansion {
public:
    KelvinExpansion(const EllipseSpectrum& spec, int n_nodes = 128);

    /// Partial sum with families up to index n_trunc.
    Mat2 reconstruct(const Vec2& x, const Vec2& y, int n_trunc) const;
    /// Entrywise max error against the Kelvin matrix.
    double error(const Vec2& x, const Vec2& y, int n_trunc) const;

private:
    Vec2 side_value(int j, int n, const Vec2& pt) const;

    EllipseSpectrum spec_;
    DiscreteNP np_;
    std::vector<VecX> w_densities_;
    double rho_boundary_tol_;
};

}  // namespace elastonp
