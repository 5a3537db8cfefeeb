#include "elastonp/kernels.hpp"

#include <cmath>
#include <numbers>

namespace elastonp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void reject_coincident(const Vec2& r) {
    if (r.squaredNorm() == 0.0)
        throw std::invalid_argument("kernel evaluation at coincident points");
}

// Cauchy/regular split evaluated with displacement d and normal n:
//   K1 = (n d^T - d n^T) / (2 pi |d|^2)
//   K2 = (mu/(2mu+l)) (d.n)/(2 pi |d|^2) I + (2(mu+l)/(2mu+l)) (d.n)/(2 pi |d|^4) d d^T
// The traction kernels are -(mu/(2mu+l)) K1 + K2 with d = y-x (source side)
// or d = x-y (target side).
KernelSplit split_impl(const LameParams& p, const Vec2& d, const Vec2& n) {
    reject_coincident(d);
    const double r2 = d.squaredNorm();
    const double dn = d.dot(n);
    const double c = p.mu / (2.0 * p.mu + p.lambda);
    KernelSplit ks;
    ks.k1_part = (n * d.transpose() - d * n.transpose()) / (kTwoPi * r2);
    ks.k2_part = c * dn / (kTwoPi * r2) * Mat2::Identity() +
                 (2.0 * (p.mu + p.lambda) / (2.0 * p.mu + p.lambda)) * dn /
                     (kTwoPi * r2 * r2) * (d * d.transpose());
    ks.k1_weight = -c;
    return ks;
}
}  // namespace

Mat2 kelvin_matrix(const LameParams& p, const Vec2& x, const Vec2& y) {
    const Vec2 r = x - y;
    reject_coincident(r);
    const double r2 = r.squaredNorm();
    return (p.alpha1() / kTwoPi) * 0.5 * std::log(r2) * Mat2::Identity() -
           (p.alpha2() / kTwoPi) / r2 * (r * r.transpose());
}

std::array<Mat2, 2> kelvin_gradient(const LameParams& p, const Vec2& r) {
    reject_coincident(r);
    const double r2 = r.squaredNorm();
    const double a1 = p.alpha1() / kTwoPi, a2 = p.alpha2() / kTwoPi;
    std::array<Mat2, 2> d;
    for (int k = 0; k < 2; ++k) {
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const double did = (k == i) ? 1.0 : 0.0;
                const double djd = (k == j) ? 1.0 : 0.0;
                const double dij = (i == j) ? 1.0 : 0.0;
                d[k](i, j) = a1 * dij * r[k] / r2 -
                             a2 * ((did * r[j] + djd * r[i]) / r2 -
                                   2.0 * r[i] * r[j] * r[k] / (r2 * r2));
            }
        }
    }
    return d;
}

std::array<std::array<Mat2, 2>, 2> kelvin_hessian(const LameParams& p, const Vec2& r) {
    reject_coincident(r);
    const double r2 = r.squaredNorm();
    const double r4 = r2 * r2;
    const double a1 = p.alpha1() / kTwoPi, a2 = p.alpha2() / kTwoPi;
    auto kd = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    std::array<std::array<Mat2, 2>, 2> e;
    for (int m = 0; m < 2; ++m) {
        for (int l = 0; l < 2; ++l) {
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    const double t1 = a1 * kd(i, j) * (kd(m, l) / r2 - 2.0 * r[l] * r[m] / r4);
                    const double t2 =
                        kd(l, i) * (kd(m, j) / r2 - 2.0 * r[j] * r[m] / r4) +
                        kd(l, j) * (kd(m, i) / r2 - 2.0 * r[i] * r[m] / r4);
                    const double t3 =
                        (kd(m, i) * r[j] * r[l] + kd(m, j) * r[i] * r[l] +
                         kd(m, l) * r[i] * r[j]) / r4 -
                        4.0 * r[i] * r[j] * r[l] * r[m] / (r4 * r2);
                    e[m][l](i, j) = t1 - a2 * (t2 - 2.0 * t3);
                }
            }
        }
    }
    return e;
}

KernelSplit kernel_split(const LameParams& p, const Vec2& x, const Vec2& y, const Vec2& n_y) {
    return split_impl(p, y - x, n_y);
}

Mat2 traction_kernel(const LameParams& p, const Vec2& x, const Vec2& y, const Vec2& n_y) {
    return kernel_split(p, x, y, n_y).total();
}

Mat2 adjoint_traction_kernel(const LameParams& p, const Vec2& x, const Vec2& y,
                             const Vec2& n_x) {
    return split_impl(p, x - y, n_x).total();
}

Mat2 traction_regular_diagonal(const LameParams& p, double diag_curv, const Vec2& tangent_hat) {
    const double c = p.mu / (2.0 * p.mu + p.lambda);
    return diag_curv / kTwoPi *
           (c * Mat2::Identity() +
            (2.0 * (p.mu + p.lambda) / (2.0 * p.mu + p.lambda)) *
                (tangent_hat * tangent_hat.transpose()));
}

Vec2 traction_of_jacobian(const LameParams& p, const Mat2& jac, const Vec2& n) {
    const double div = jac(0, 0) + jac(1, 1);
    Vec2 t;
    for (int i = 0; i < 2; ++i) {
        double s = p.lambda * div * n[i];
        for (int k = 0; k < 2; ++k) s += p.mu * (jac(i, k) + jac(k, i)) * n[k];
        t[i] = s;
    }
    return t;
}

}  // namespace elastonp
