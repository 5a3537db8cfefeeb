#include "elastonp/core_types.hpp"

#include <cmath>
#include <numbers>
#include <thread>

namespace elastonp {

namespace {
constexpr double kPi = std::numbers::pi;

int g_threads = []() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}();
}  // namespace

int thread_count() { return g_threads; }

void set_thread_count(int n) { g_threads = std::max(1, n); }

void parallel_for(int n, const std::function<void(int)>& body) {
    const int nt = std::min(g_threads, n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&, t]() {
            for (int i = t; i < n; i += nt) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

LinearFit fit_line(const VecX& x, const VecX& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need at least two matching points");
    const double n = static_cast<double>(x.size());
    const double xm = x.mean(), ym = y.mean();
    const double sxx = (x.array() - xm).square().sum();
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    const double sxy = ((x.array() - xm) * (y.array() - ym)).sum();
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = ym - f.slope * xm;
    f.rms_residual = std::sqrt(
        (y.array() - f.intercept - f.slope * x.array()).square().sum() / n);
    return f;
}

LameParams::LameParams(double lambda_, double mu_) : lambda(lambda_), mu(mu_) {
    if (!(mu > 0.0) || !(2.0 * lambda + 2.0 * mu > 0.0))
        throw std::invalid_argument(
            "LameParams: strong convexity requires mu > 0 and lambda + mu > 0");
}

EllipseGeometry::EllipseGeometry(double a_, double b_) : a(a_), b(b_) {
    if (!(a > b) || !(b > 0.0))
        throw std::invalid_argument("EllipseGeometry: requires a > b > 0 (use a disk for a = b)");
    focal_scale = std::sqrt(a * a - b * b);
    rho0 = std::atanh(b / a);
}

double EllipseGeometry::metric(double rho, double omega) const {
    const double sh = std::sinh(rho), s = std::sin(omega);
    return focal_scale * std::sqrt(sh * sh + s * s);
}

Vec2 elliptic_to_cartesian(const EllipseGeometry& geom, double rho, double omega) {
    return {geom.focal_scale * std::cosh(rho) * std::cos(omega),
            geom.focal_scale * std::sinh(rho) * std::sin(omega)};
}

EllipticCoords cartesian_to_elliptic(const EllipseGeometry& geom, const Vec2& x) {
    const double R = geom.focal_scale;
    // Distance to the focal segment [-R, R] x {0}.
    const double dseg = (std::abs(x[0]) <= R)
                            ? std::abs(x[1])
                            : std::hypot(std::abs(x[0]) - R, x[1]);
    if (dseg <= 1e-14 * R)
        throw std::domain_error("cartesian_to_elliptic: point on the focal segment");

    const Complex w(x[0] / R, x[1] / R);
    Complex xi = std::acosh(w);  // principal branch, Re >= 0
    double rho = xi.real();
    double omega = xi.imag();
    if (rho < 0.0) {  // guard against -0 style results
        rho = -rho;
        omega = -omega;
    }
    omega = std::fmod(omega, 2.0 * kPi);
    if (omega < 0.0) omega += 2.0 * kPi;
    return {rho, omega};
}

BoundaryCurve::BoundaryCurve(CurveParametrization param, int n_nodes)
    : n_(n_nodes), step_(2.0 * kPi / n_nodes), param_(std::move(param)) {
    if (n_nodes < 16 || n_nodes % 2 != 0)
        throw std::invalid_argument("BoundaryCurve: node count must be even and >= 16");
    node_.resize(n_);
    normal_.resize(n_);
    tangent_.resize(n_);
    second_.resize(n_);
    speed_.resize(n_);
    diag_curv_.resize(n_);
    weight_.resize(n_);
    for (int k = 0; k < n_; ++k) {
        const double w = step_ * k;
        node_[k] = param_.position(w);
        const Vec2 d1 = param_.derivative(w);
        const Vec2 d2 = param_.second_derivative(w);
        const double sp = d1.norm();
        if (!(sp > 0.0)) throw std::invalid_argument("BoundaryCurve: vanishing tangent");
        tangent_[k] = d1 / sp;
        normal_[k] = Vec2(tangent_[k][1], -tangent_[k][0]);  // outward for CCW curves
        second_[k] = d2;
        speed_[k] = sp;
        weight_[k] = sp * step_;
        diag_curv_[k] = -d2.dot(normal_[k]) / (2.0 * sp * sp);
    }
}

double BoundaryCurve::perimeter() const {
    double s = 0.0;
    for (int k = 0; k < n_; ++k) s += weight_[k];
    return s;
}

BoundaryCurve BoundaryCurve::disk(double radius, int n_nodes) {
    if (!(radius > 0.0)) throw std::invalid_argument("disk: radius must be positive");
    CurveParametrization p;
    p.position = [radius](double t) { return Vec2(radius * std::cos(t), radius * std::sin(t)); };
    p.derivative = [radius](double t) { return Vec2(-radius * std::sin(t), radius * std::cos(t)); };
    p.second_derivative = [radius](double t) {
        return Vec2(-radius * std::cos(t), -radius * std::sin(t));
    };
    return BoundaryCurve(std::move(p), n_nodes);
}

BoundaryCurve BoundaryCurve::ellipse(const EllipseGeometry& geom, int n_nodes) {
    const double a = geom.a, b = geom.b;
    CurveParametrization p;
    p.position = [a, b](double t) { return Vec2(a * std::cos(t), b * std::sin(t)); };
    p.derivative = [a, b](double t) { return Vec2(-a * std::sin(t), b * std::cos(t)); };
    p.second_derivative = [a, b](double t) { return Vec2(-a * std::cos(t), -b * std::sin(t)); };
    return BoundaryCurve(std::move(p), n_nodes);
}

BoundaryCurve BoundaryCurve::from_parametrization(CurveParametrization param, int n_nodes) {
    return BoundaryCurve(std::move(param), n_nodes);
}

BoundaryCurve make_disk_curve(double radius, int n_nodes) {
    return BoundaryCurve::disk(radius, n_nodes);
}

BoundaryCurve make_ellipse_curve(const EllipseGeometry& geom, int n_nodes) {
    return BoundaryCurve::ellipse(geom, n_nodes);
}

}  // namespace elastonp
