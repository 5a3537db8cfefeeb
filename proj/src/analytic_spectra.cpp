#include "elastonp/analytic_spectra.hpp"

#include <cmath>
#include <numbers>

namespace elastonp {

namespace {
constexpr double kPi = std::numbers::pi;
}

Vec2 DiskSpectrum::eigenfunction(Mode mode, int m, double theta) const {
    const double c = std::cos(m * theta), s = std::sin(m * theta);
    switch (mode) {
        case Mode::rigid_tx: return {1.0, 0.0};
        case Mode::rigid_ty: return {0.0, 1.0};
        case Mode::rigid_rot:
            return {radius * std::sin(theta), -radius * std::cos(theta)};
        case Mode::radial:
            return {radius * std::cos(theta), radius * std::sin(theta)};
        case Mode::plus_cos: return {c, s};
        case Mode::plus_rot: return {-s, c};
        case Mode::minus_cos: return {c, -s};
        case Mode::minus_rot: return {s, c};
    }
    return Vec2::Zero();
}

DiskSpectrum disk_spectrum(const LameParams& params, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("disk_spectrum: radius must be positive");
    return DiskSpectrum{params, radius};
}

EllipseSpectrum::EllipseSpectrum(const LameParams& params, const EllipseGeometry& geom)
    : params_(params), geom_(geom) {
    q_ = (params_.lambda + params_.mu) * std::sinh(2.0 * geom_.rho0);
}

double EllipseSpectrum::pn(int n) const {
    return (0.5 - params_.k0()) * std::exp(-2.0 * n * geom_.rho0);
}

double EllipseSpectrum::gamma_scaled(int n, int sign) const {
    if (n < 1) throw std::invalid_argument("gamma_scaled: n >= 1");
    const double l = params_.lambda, m = params_.mu;
    const double e2 = std::exp(-2.0 * n * geom_.rho0);
    const double t = m + (sign >= 0 ? 1.0 : -1.0) * n * q_ * e2;
    return std::sqrt(t * t + (l + m) * (l + 3.0 * m) * e2 * e2);
}

double EllipseSpectrum::raw_eigenvalue(int j, int n) const {
    if (n < 1 || j < 1 || j > 4) throw std::invalid_argument("raw_eigenvalue: bad index");
    const double denom = 2.0 * (params_.lambda + 2.0 * params_.mu);
    const double e2 = std::exp(-2.0 * n * geom_.rho0);
    switch (j) {
        case 1: return (-q_ * n * e2 + gamma_scaled(n, -1)) / denom;
        case 2: return (q_ * n * e2 + gamma_scaled(n, +1)) / denom;
        case 3: return (-q_ * n * e2 - gamma_scaled(n, -1)) / denom;
        default: return (q_ * n * e2 - gamma_scaled(n, +1)) / denom;
    }
}

double EllipseSpectrum::accumulation_gap(int j, int n) const {
    if (n < 1 || j < 1 || j > 4) throw std::invalid_argument("accumulation_gap: bad index");
    const double l = params_.lambda, m = params_.mu;
    const double denom = 2.0 * (l + 2.0 * m);
    const double e2 = std::exp(-2.0 * n * geom_.rho0);
    const double qe = q_ * n * e2;
    const double s = (l + m) * (l + 3.0 * m) * e2 * e2;
    // rationalized forms of gamma^{+-} - (mu -+ q n e2)
    switch (j) {
        case 1: return (s - 4.0 * m * qe) / (gamma_scaled(n, -1) + m + qe) / denom;
        case 2: return (s + 4.0 * m * qe) / (gamma_scaled(n, +1) + m - qe) / denom;
        case 3: return -s / (gamma_scaled(n, -1) + m - qe) / denom;
        default: return -s / (gamma_scaled(n, +1) + m + qe) / denom;
    }
}

double EllipseSpectrum::eigenvalue(int j, int n) const {
    if (j == 2 && n == 1)
        throw std::invalid_argument(
            "eigenvalue: (2,1) belongs to the 1/2 eigenspace; see half_eigenfunction");
    if (j == 2 && n < 2) throw std::invalid_argument("eigenvalue: j=2 requires n >= 2");
    return raw_eigenvalue(j, n);
}

std::vector<EllipseSpectrum::Entry> EllipseSpectrum::eigenvalue_table(int n_max) const {
    if (n_max < 1) throw std::invalid_argument("eigenvalue_table: n_max >= 1");
    std::vector<Entry> t;
    for (int n = 1; n <= n_max; ++n) {
        for (int j = 1; j <= 4; ++j) {
            const double v = (j == 2 && n == 1) ? 0.5 : raw_eigenvalue(j, n);
            t.push_back({j, n, v});
        }
    }
    return t;
}

Mat2 EllipseSpectrum::transfer_matrix_13(int n) const {
    const double m = params_.mu, a1 = params_.alpha1(), a2 = params_.alpha2();
    const double e2 = std::exp(-2.0 * n * geom_.rho0);
    const double s2 = std::sinh(2.0 * geom_.rho0);
    Mat2 t;
    t << params_.k0() - 2.0 * n * m * a2 * s2 * e2, m * a1 * e2,
         m * a2 * e2, -params_.k0();
    return t;
}

Mat2 EllipseSpectrum::transfer_matrix_24(int n) const {
    const double m = params_.mu, a1 = params_.alpha1(), a2 = params_.alpha2();
    const double e2 = std::exp(-2.0 * n * geom_.rho0);
    const double s2 = std::sinh(2.0 * geom_.rho0);
    Mat2 t;
    t << params_.k0() + 2.0 * n * m * a2 * s2 * e2, m * a1 * e2,
         m * a2 * e2, -params_.k0();
    return t;
}

Vec2 EllipseSpectrum::basis_density(int j, int n, double omega) const {
    if (n < 1 || j < 1 || j > 4) throw std::invalid_argument("basis_density: bad index");
    const double h0 = geom_.boundary_metric(omega);
    const double c = std::cos(n * omega), s = std::sin(n * omega);
    switch (j) {
        case 1: return Vec2(c, s) / h0;
        case 2: return Vec2(-s, c) / h0;
        case 3: return Vec2(c, -s) / h0;
        default: return Vec2(s, c) / h0;
    }
}

Eigen::Vector2d EllipseSpectrum::eigen_coeffs(int j, int n) const {
    if (j == 2 && n == 1)
        throw std::invalid_argument("eigen_coeffs: (2,1) belongs to the 1/2 eigenspace");
    const double k0 = params_.k0();
    // k0 + k_{3,n} and k0 + k_{4,n} are the accumulation gaps themselves;
    // forming them from the raw values would cancel catastrophically.
    switch (j) {
        case 1: return {1.0, pn(n) / (2.0 * k0 + accumulation_gap(1, n))};
        case 2: return {1.0, pn(n) / (2.0 * k0 + accumulation_gap(2, n))};
        case 3: return {accumulation_gap(3, n) / pn(n), 1.0};
        case 4: return {accumulation_gap(4, n) / pn(n), 1.0};
        default: throw std::invalid_argument("eigen_coeffs: bad family");
    }
}

Vec2 EllipseSpectrum::eigen_density(int j, int n, double omega) const {
    const Eigen::Vector2d c = eigen_coeffs(j, n);
    const int low = (j == 1 || j == 3) ? 1 : 2;
    return c[0] * basis_density(low, n, omega) + c[1] * basis_density(low + 2, n, omega);
}

Vec2 EllipseSpectrum::half_eigenfunction(int i, double omega) const {
    const double h0 = geom_.boundary_metric(omega);
    if (i == 0) return Vec2(1.0, 0.0) / h0;
    if (i == 1) return Vec2(0.0, 1.0) / h0;
    const double l = params_.lambda, m = params_.mu;
    const double e = std::exp(-2.0 * geom_.rho0);
    return Vec2(((l + m) * e - (l + 3.0 * m)) * std::sin(omega),
                ((l + m) * e + (l + 3.0 * m)) * std::cos(omega)) / h0;
}

double EllipseSpectrum::basis_norm2(int j, int n) const {
    const double a1 = params_.alpha1(), a2 = params_.alpha2();
    const double e2 = std::exp(-2.0 * n * geom_.rho0);
    const double s2 = std::sinh(2.0 * geom_.rho0);
    switch (j) {
        case 1: return kPi * (a1 / n - 2.0 * a2 * s2 * e2);
        case 2: return kPi * (a1 / n + 2.0 * a2 * s2 * e2);
        case 3:
        case 4: return kPi * params_.kolosov() * a2 / n;
        default: throw std::invalid_argument("basis_norm2: bad family");
    }
}

double EllipseSpectrum::basis_cross(int n) const {
    return kPi * params_.alpha1() * std::exp(-2.0 * n * geom_.rho0) / n;
}

double EllipseSpectrum::eigen_norm2(int j, int n) const {
    const Eigen::Vector2d c = eigen_coeffs(j, n);
    const int low = (j == 1 || j == 3) ? 1 : 2;
    return c[0] * c[0] * basis_norm2(low, n) + c[1] * c[1] * basis_norm2(low + 2, n) +
           2.0 * c[0] * c[1] * basis_cross(n);
}

double EllipseSpectrum::eigen_cross(int pair, int n) const {
    const int jlow = pair == 0 ? 1 : 2;
    const Eigen::Vector2d ca = eigen_coeffs(jlow, n);
    const Eigen::Vector2d cb = eigen_coeffs(jlow + 2, n);
    return ca[0] * cb[0] * basis_norm2(jlow, n) + ca[1] * cb[1] * basis_norm2(jlow + 2, n) +
           (ca[0] * cb[1] + ca[1] * cb[0]) * basis_cross(n);
}

void EllipseSpectrum::check_exterior(double rho) const {
    if (rho < geom_.rho0 * (1.0 - 1e-12) - 1e-14)
        throw std::domain_error("ellipse single layer closed form requires rho >= rho0");
}

// Closed forms for S[beta h0^{-1} e^{+- i n omega}] as sums of
// coeff * e^{a (rho - rho0)} * e^{i b nu} * (R^2/h^2)^p. The stored
// coefficients absorb every e^{+- n rho0} factor and stay bounded for all n,
// so large indices never overflow.
std::vector<EllipseSpectrum::Term> EllipseSpectrum::field_terms(int j, int n) const {
    if (n < 1 || j < 1 || j > 4) throw std::invalid_argument("field_terms: bad index");
    const double a1 = params_.alpha1(), a2 = params_.alpha2(), kap = params_.kolosov();
    const double r0 = geom_.rho0;
    const Complex beta = (j == 2 || j == 4) ? Complex(0.0, 1.0) : Complex(1.0, 0.0);
    const Complex betac = std::conj(beta);
    const bool plus_branch = (j == 1 || j == 2);  // e^{+ i n omega} densities
    const double e2n = std::exp(-2.0 * n * r0);
    const double e2 = std::exp(2.0 * r0), e2i = std::exp(-2.0 * r0);
    std::vector<Term> t;
    t.reserve(8);
    if (plus_branch) {
        // S = -(beta/2n)[kap a2 e^{-n(rho+rho0)} e^{-i n nu} + a1 e^{-n(rho-rho0)} e^{i n nu}]
        //   + (conj(beta) a2 R^2 / 4 h^2) e^{-n(rho+rho0)}
        //     [e^{i n nu} sinh 2(rho+rho0) + (e^{-2 rho0}-e^{2 rho})/2 e^{i(n+2)nu}
        //      + (e^{-2 rho}-e^{2 rho0})/2 e^{i(n-2)nu}]
        const Complex w = betac * a2 / 8.0;
        t.push_back({-beta * kap * a2 * e2n / (2.0 * n), double(-n), -n, 0});
        t.push_back({-beta * a1 / (2.0 * n), double(-n), n, 0});
        t.push_back({w * e2n * e2 * e2, double(-n + 2), n, 1});
        t.push_back({-w * e2n * e2i * e2i, double(-n - 2), n, 1});
        t.push_back({w * e2n * e2i, double(-n), n + 2, 1});
        t.push_back({-w * e2n * e2, double(-n + 2), n + 2, 1});
        t.push_back({w * e2n * e2i, double(-n - 2), n - 2, 1});
        t.push_back({-w * e2n * e2, double(-n), n - 2, 1});
    } else {
        // S = -(beta/2n)[kap a2 e^{-n(rho-rho0)} e^{-i n nu} + a1 e^{-n(rho+rho0)} e^{i n nu}]
        //   + (conj(beta) a2 R^2 / 4 h^2) e^{-n(rho-rho0)}
        //     [e^{i n nu} sinh 2(rho-rho0) + (e^{2 rho0}-e^{2 rho})/2 e^{i(n+2)nu}
        //      + (e^{-2 rho}-e^{-2 rho0})/2 e^{i(n-2)nu}]
        const Complex w = betac * a2 / 8.0;
        t.push_back({-beta * kap * a2 / (2.0 * n), double(-n), -n, 0});
        t.push_back({-beta * a1 * e2n / (2.0 * n), double(-n), n, 0});
        t.push_back({w, double(-n + 2), n, 1});
        t.push_back({-w, double(-n - 2), n, 1});
        t.push_back({w * e2, double(-n), n + 2, 1});
        t.push_back({-w * e2, double(-n + 2), n + 2, 1});
        t.push_back({w * e2i, double(-n - 2), n - 2, 1});
        t.push_back({-w * e2i, double(-n), n - 2, 1});
    }
    return t;
}

Complex EllipseSpectrum::eval_terms(const std::vector<Term>& terms, double rho,
                                    double omega) const {
    const double h2 = std::pow(geom_.metric(rho, omega), 2);
    const double u = geom_.focal_scale * geom_.focal_scale / h2;
    Complex s = 0.0;
    for (const Term& t : terms) {
        const double radial = std::exp(t.arho * (rho - geom_.rho0));
        const Complex ang(std::cos(t.bnu * omega), std::sin(t.bnu * omega));
        s += t.coeff * radial * ang * (t.upow == 1 ? u : 1.0);
    }
    return s;
}

void EllipseSpectrum::eval_terms_grad(const std::vector<Term>& terms, double rho, double omega,
                                      Complex& val, Complex& drho, Complex& dnu) const {
    const double h2 = std::pow(geom_.metric(rho, omega), 2);
    const double u = geom_.focal_scale * geom_.focal_scale / h2;
    const double sh2 = std::sinh(2.0 * rho), sn2 = std::sin(2.0 * omega);
    val = drho = dnu = 0.0;
    for (const Term& t : terms) {
        const double radial = std::exp(t.arho * (rho - geom_.rho0));
        const Complex ang(std::cos(t.bnu * omega), std::sin(t.bnu * omega));
        const Complex v = t.coeff * radial * ang * (t.upow == 1 ? u : 1.0);
        val += v;
        drho += v * (t.arho - t.upow * u * sh2);
        dnu += v * (Complex(0.0, t.bnu) - t.upow * u * sn2);
    }
}

Vec2 EllipseSpectrum::single_layer_basis(int j, int n, double rho, double omega) const {
    check_exterior(rho);
    const Complex s = eval_terms(field_terms(j, n), rho, omega);
    return {s.real(), s.imag()};
}

Vec2 EllipseSpectrum::single_layer_eigen(int j, int n, double rho, double omega) const {
    const Eigen::Vector2d c = eigen_coeffs(j, n);
    const int low = (j == 1 || j == 3) ? 1 : 2;
    return c[0] * single_layer_basis(low, n, rho, omega) +
           c[1] * single_layer_basis(low + 2, n, rho, omega);
}

Vec2 EllipseSpectrum::single_layer_eigen_cart(int j, int n, const Vec2& x) const {
    const EllipticCoords c = cartesian_to_elliptic(geom_, x);
    return single_layer_eigen(j, n, c.rho, c.omega);
}

Mat2 EllipseSpectrum::grad_single_layer_basis(int j, int n, double rho, double omega) const {
    check_exterior(rho);
    Complex val, drho, dnu;
    eval_terms_grad(field_terms(j, n), rho, omega, val, drho, dnu);
    const double h2 = std::pow(geom_.metric(rho, omega), 2);
    Mat2 chain;  // (R / h^2) C(rho, omega)
    chain << std::cos(omega) * std::sinh(rho), -std::sin(omega) * std::cosh(rho),
             std::sin(omega) * std::cosh(rho), std::cos(omega) * std::sinh(rho);
    chain *= geom_.focal_scale / h2;
    Mat2 g;  // row k = gradient of component k
    const Eigen::Vector2d d1(drho.real(), dnu.real());
    const Eigen::Vector2d d2(drho.imag(), dnu.imag());
    g.row(0) = (chain * d1).transpose();
    g.row(1) = (chain * d2).transpose();
    return g;
}

double EllipseSpectrum::coupling_exact_basis(int j, int n, const Mat2& a, double rho,
                                             double omega) const {
    const Mat2 g = grad_single_layer_basis(j, n, rho, omega);
    // (A grad)^T S = a1 . grad S_1 + a2 . grad S_2
    return a.row(0).dot(g.row(0)) + a.row(1).dot(g.row(1));
}

double EllipseSpectrum::coupling_leading_basis(int j, int n, const Mat2& a, double rho,
                                               double omega) const {
    check_exterior(rho);
    const double r = geom_.focal_scale;
    const double h2 = std::pow(geom_.metric(rho, omega), 2);
    const Vec2 a1v = a.row(0).transpose(), a2v = a.row(1).transpose();
    const Vec2 b(std::cos(omega) * std::sinh(rho), std::sin(omega) * std::cosh(rho));
    const Vec2 ub = rotation(n * omega) * b;
    const double decay = std::exp(-n * (rho - geom_.rho0));
    switch (j) {
        case 1:
            return r * params_.alpha1() * decay / (2.0 * h2) *
                   (a1v + rotation(kPi / 2.0) * a2v).dot(ub);
        case 2:
            return r * params_.alpha1() * decay / (2.0 * h2) *
                   (rotation(-kPi / 2.0) * a1v + a2v).dot(ub);
        case 3:
            return -n * params_.alpha2() * r * r * r * decay / (8.0 * h2 * h2) *
                   (u_tilde(rho, omega) * (a1v + rotation(kPi / 2.0) * a2v)).dot(ub);
        case 4:
            return n * params_.alpha2() * r * r * r * decay / (8.0 * h2 * h2) *
                   (u_tilde(rho, omega) * (rotation(-kPi / 2.0) * a1v + a2v)).dot(ub);
        default:
            throw std::invalid_argument("coupling_leading_basis: bad family");
    }
}

double EllipseSpectrum::coupling_exact_eigen(int j, int n, const Mat2& a, double rho,
                                             double omega) const {
    const Eigen::Vector2d c = eigen_coeffs(j, n);
    const int low = (j == 1 || j == 3) ? 1 : 2;
    return c[0] * coupling_exact_basis(low, n, a, rho, omega) +
           c[1] * coupling_exact_basis(low + 2, n, a, rho, omega);
}

Mat2 EllipseSpectrum::u_tilde(double rho, double omega) const {
    const double r0 = geom_.rho0;
    const double d = rho - r0;
    return (std::exp(2.0 * d) - std::exp(-2.0 * d)) * Mat2::Identity() +
           (std::exp(2.0 * r0) - std::exp(2.0 * rho)) * rotation(-2.0 * omega) +
           (std::exp(-2.0 * rho) - std::exp(-2.0 * r0)) * rotation(2.0 * omega);
}

double EllipseSpectrum::u_tilde_det(double rho, double omega) const {
    return u_tilde(rho, omega).determinant();
}

KelvinExpansion::KelvinExpansion(const EllipseSpectrum& spec, int n_nodes)
    : spec_(spec),
      np_(assemble(spec.params(), make_ellipse_curve(spec.geometry(), n_nodes))),
      rho_boundary_tol_(1e-10) {
    for (int i = 0; i < 3; ++i) w_densities_.push_back(np_.w_basis.col(i));
}

Vec2 KelvinExpansion::side_value(int j, int n, const Vec2& pt) const {
    EllipticCoords c{};
    bool exterior = true;
    try {
        c = cartesian_to_elliptic(spec_.geometry(), pt);
        exterior = c.rho >= spec_.geometry().rho0 - rho_boundary_tol_;
    } catch (const std::domain_error&) {
        exterior = false;  // on the focal segment: interior
    }
    if (exterior) return spec_.single_layer_eigen(j, n, std::max(c.rho, spec_.geometry().rho0), c.omega);
    // interior: quadrature on the sampled density
    VecX dens(2 * np_.size());
    for (int k = 0; k < np_.size(); ++k) {
        const Vec2 v = spec_.eigen_density(j, n, np_.curve.parameter(k));
        dens[2 * k] = v[0];
        dens[2 * k + 1] = v[1];
    }
    return single_layer_offsurface(np_, dens, pt);
}

Mat2 KelvinExpansion::reconstruct(const Vec2& x, const Vec2& y, int n_trunc) const {
    Mat2 acc = Mat2::Zero();
    // rank-3 term from the 1/2-eigenspace
    for (int i = 0; i < 3; ++i) {
        const Vec2 sx = single_layer_offsurface(np_, w_densities_[i], x);
        const Vec2 fy = np_.psi_field(i, y);
        acc += sx * fy.transpose();
    }
    // eigen-pairs, ascending n, orthonormalized through the exact 2x2 gram
    for (int n = 1; n <= n_trunc; ++n) {
        for (int pair = 0; pair < 2; ++pair) {
            const int jlow = pair == 0 ? 1 : 2;
            if (pair == 1 && n == 1) {
                // (2,1) lives in the 1/2 eigenspace: only phi_{4,1} remains
                const double nrm = std::sqrt(spec_.eigen_norm2(4, 1));
                const Vec2 sx = side_value(4, 1, x) / nrm;
                const Vec2 sy = side_value(4, 1, y) / nrm;
                acc -= sx * sy.transpose();
                continue;
            }
            Mat2 g2;
            g2 << spec_.eigen_norm2(jlow, n), spec_.eigen_cross(pair, n),
                  spec_.eigen_cross(pair, n), spec_.eigen_norm2(jlow + 2, n);
            const Eigen::LLT<Mat2> llt(g2);
            const Mat2 l = llt.matrixL();
            // [phi_hat_A phi_hat_B] = [phi_low phi_high] L^{-T}
            const double inv11 = 1.0 / l(0, 0);
            const double inv22 = 1.0 / l(1, 1);
            const double off = -l(1, 0) * inv11 * inv22;
            const Vec2 sxl = side_value(jlow, n, x), sxh = side_value(jlow + 2, n, x);
            const Vec2 syl = side_value(jlow, n, y), syh = side_value(jlow + 2, n, y);
            const Vec2 ax = sxl * inv11, ay = syl * inv11;
            const Vec2 bx = sxl * off + sxh * inv22, by = syl * off + syh * inv22;
            acc -= ax * ay.transpose();
            acc -= bx * by.transpose();
        }
    }
    return acc;
}

double KelvinExpansion::error(const Vec2& x, const Vec2& y, int n_trunc) const {
    const Mat2 rec = reconstruct(x, y, n_trunc);
    const Mat2 ref = kelvin_matrix(spec_.params(), x, y);
    return (rec - ref).cwiseAbs().maxCoeff();
}

}  // namespace elastonp
