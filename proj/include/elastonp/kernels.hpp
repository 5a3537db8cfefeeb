#pragma once

#include <array>

#include "elastonp/core_types.hpp"

namespace elastonp {

/// Kelvin matrix of fundamental solutions, planar branch:
/// Gamma_ij(r) = (alpha1/2pi) delta_ij ln|r| - (alpha2/2pi) r_i r_j / |r|^2, r = x - y.
/// Throws std::invalid_argument on coincident points.
Mat2 kelvin_matrix(const LameParams& p, const Vec2& x, const Vec2& y);

/// First derivatives d[k](i,j) = dGamma_ij / dr_k evaluated at r.
std::array<Mat2, 2> kelvin_gradient(const LameParams& p, const Vec2& r);

/// Second derivatives e[m][l](i,j) = d^2 Gamma_ij / dr_m dr_l at r.
std::array<std::array<Mat2, 2>, 2> kelvin_hessian(const LameParams& p, const Vec2& r);

/// Cauchy-singular / weakly singular split of the traction kernel. The full
/// kernel recomposes as -(mu/(2mu+lambda)) * k1_part + k2_part.
struct KernelSplit {
    Mat2 k1_part;  // antisymmetric Cauchy part
    Mat2 k2_part;  // bounded part on smooth curves (carries the (x-y).n factor)
    double k1_weight;  // -(mu / (2 mu + lambda))
    Mat2 total() const { return k1_weight * k1_part + k2_part; }
};

KernelSplit kernel_split(const LameParams& p, const Vec2& x, const Vec2& y, const Vec2& n_y);

/// Traction of the Kelvin columns with respect to the source point:
/// A(x,y) = d_{nu_y} Gamma(x-y). Kernel of the NP operator on traces.
Mat2 traction_kernel(const LameParams& p, const Vec2& x, const Vec2& y, const Vec2& n_y);

/// Traction with respect to the target point: B(x,y) = d_{nu_x} Gamma(x-y).
/// Kernel of the adjoint NP operator on densities; also the integrand of the
/// single-layer conormal derivative off the curve.
Mat2 adjoint_traction_kernel(const LameParams& p, const Vec2& x, const Vec2& y, const Vec2& n_x);

/// Coincidence limit of the bounded kernel part along the curve. diag_curv is
/// -(gamma''. n)/(2 |gamma'|^2) at the node and tangent_hat the unit tangent;
/// the same limit applies to both traction kernels.
Mat2 traction_regular_diagonal(const LameParams& p, double diag_curv, const Vec2& tangent_hat);

/// Conormal derivative (traction) of a displacement field u at x in direction
/// of the unit normal n: lambda (div u) n + 2 mu sym(grad u) n. jac(k,i) = d_k u_i.
Vec2 traction_of_jacobian(const LameParams& p, const Mat2& jac, const Vec2& n);

}  // namespace elastonp
