#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "elastonp/types.hpp"

namespace elastonp {

/// Background Lamé pair (lambda, mu), treated as dimensionless. Construction
/// enforces the planar strong convexity condition mu > 0, lambda + mu > 0.
struct LameParams {
    double lambda;
    double mu;

    LameParams(double lambda_, double mu_);

    double alpha1() const { return 0.5 * (1.0 / mu + 1.0 / (2.0 * mu + lambda)); }
    double alpha2() const { return 0.5 * (1.0 / mu - 1.0 / (2.0 * mu + lambda)); }
    /// Kolosov constant (lambda + 3 mu) / (lambda + mu).
    double kolosov() const { return (lambda + 3.0 * mu) / (lambda + mu); }
    /// Accumulation constant of the NP spectrum, mu / (2 (2 mu + lambda)); lies in (0, 1/2).
    double k0() const { return mu / (2.0 * (2.0 * mu + lambda)); }
};

/// Ellipse x1^2/a^2 + x2^2/b^2 = 1 with a > b > 0, in elliptic coordinates
/// x = (R cosh(rho) cos(omega), R sinh(rho) sin(omega)), boundary at rho = rho0.
struct EllipseGeometry {
    double a;            // semi-major
    double b;            // semi-minor
    double focal_scale;  // R = sqrt(a^2 - b^2)
    double rho0;

    EllipseGeometry(double a_, double b_);

    /// Metric factor h_rho(omega) = R sqrt(sinh^2 rho + sin^2 omega).
    double metric(double rho, double omega) const;
    double boundary_metric(double omega) const { return metric(rho0, omega); }
};

struct EllipticCoords {
    double rho;
    double omega;  // in [0, 2*pi)
};

Vec2 elliptic_to_cartesian(const EllipseGeometry& geom, double rho, double omega);

/// Inverse of the elliptic chart. Throws std::domain_error for points within
/// 1e-14 (relative to R) of the focal segment, where the inversion is
/// ill-conditioned.
EllipticCoords cartesian_to_elliptic(const EllipseGeometry& geom, const Vec2& x);

/// Smooth closed-curve parametrization over [0, 2*pi). Second derivatives are
/// required by the Nystrom diagonal limits.
struct CurveParametrization {
    std::function<Vec2(double)> position;
    std::function<Vec2(double)> derivative;
    std::function<Vec2(double)> second_derivative;
};

/// Discretized smooth closed curve: equispaced parameter nodes, outward unit
/// normals, tangents, arclength weights. Immutable after construction.
class BoundaryCurve {
public:
    static BoundaryCurve disk(double radius, int n_nodes);
    static BoundaryCurve ellipse(const EllipseGeometry& geom, int n_nodes);
    static BoundaryCurve from_parametrization(CurveParametrization param, int n_nodes);

    int size() const { return n_; }
    double parameter(int k) const { return step_ * k; }
    double step() const { return step_; }

    const Vec2& node(int k) const { return node_[k]; }
    const Vec2& normal(int k) const { return normal_[k]; }
    const Vec2& tangent(int k) const { return tangent_[k]; }
    /// gamma''(omega_k)
    const Vec2& second(int k) const { return second_[k]; }
    /// |gamma'(omega_k)|
    double speed(int k) const { return speed_[k]; }
    /// Quadrature weight speed_k * 2*pi/n.
    double weight(int k) const { return weight_[k]; }
    /// Diagonal limit -(gamma''. n) / (2 |gamma'|^2) shared by the weakly
    /// singular kernel parts.
    double diag_curvature(int k) const { return diag_curv_[k]; }

    double perimeter() const;
    const CurveParametrization& parametrization() const { return param_; }
    /// Same curve rediscretized at n_nodes points.
    BoundaryCurve refined(int n_nodes) const { return from_parametrization(param_, n_nodes); }

private:
    BoundaryCurve(CurveParametrization param, int n_nodes);

    int n_;
    double step_;
    std::vector<Vec2> node_, normal_, tangent_, second_;
    std::vector<double> speed_, diag_curv_;
    std::vector<double> weight_;
    CurveParametrization param_;
};

/// Factory helpers matching the module surface.
BoundaryCurve make_disk_curve(double radius, int n_nodes);
BoundaryCurve make_ellipse_curve(const EllipseGeometry& geom, int n_nodes);

}  // namespace elastonp
