#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "elastonp/kernels.hpp"
#include "test_oracles.hpp"

using namespace elastonp;
using enp_test::test_rng;
using enp_test::traction_fd;

namespace {
constexpr double kPi = std::numbers::pi;

Vec2 random_point(std::mt19937& rng, double scale = 2.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng)};
}
}  // namespace

TEST_CASE("kelvin matrix closed-form values") {
    LameParams p(1.0, 1.0);
    // x - y = (1,0): ln 1 = 0, so only the projector term survives
    Mat2 g = kelvin_matrix(p, Vec2(1.0, 0.0), Vec2(0.0, 0.0));
    CHECK(g(0, 0) == doctest::Approx(-1.0 / (6.0 * kPi)).epsilon(1e-15));
    CHECK(g(1, 1) == doctest::Approx(0.0));
    CHECK(g(0, 1) == doctest::Approx(0.0));
    CHECK(g(1, 0) == doctest::Approx(0.0));

    CHECK_THROWS_AS(kelvin_matrix(p, Vec2(1.0, 2.0), Vec2(1.0, 2.0)), std::invalid_argument);
}

TEST_CASE("kelvin matrix symmetry properties") {
    LameParams p(1.7, 0.6);
    auto& rng = test_rng();
    for (int it = 0; it < 50; ++it) {
        const Vec2 x = random_point(rng), y = random_point(rng);
        if ((x - y).norm() < 1e-6) continue;
        const Mat2 a = kelvin_matrix(p, x, y);
        const Mat2 b = kelvin_matrix(p, y, x);
        CHECK((a - b).norm() < 1e-15 * (1.0 + a.norm()));       // even kernel
        CHECK(std::abs(a(0, 1) - a(1, 0)) < 1e-15);             // matrix symmetry
    }
}

TEST_CASE("kelvin gradient and hessian against finite differences") {
    LameParams p(2.0, 0.8);
    auto& rng = test_rng();
    for (int it = 0; it < 20; ++it) {
        Vec2 r = random_point(rng);
        if (r.norm() < 0.3) r += Vec2(1.0, 1.0);
        const auto d = kelvin_gradient(p, r);
        const auto e = kelvin_hessian(p, r);
        const double h = 1e-6;
        for (int k = 0; k < 2; ++k) {
            Vec2 dk = Vec2::Zero();
            dk[k] = h;
            const Mat2 fd =
                (kelvin_matrix(p, r + dk, Vec2::Zero()) - kelvin_matrix(p, r - dk, Vec2::Zero())) /
                (2.0 * h);
            CHECK((d[k] - fd).norm() < 1e-8);
            for (int l = 0; l < 2; ++l) {
                Vec2 dl = Vec2::Zero();
                dl[l] = h;
                const Mat2 fd2 = (kelvin_gradient(p, r + dl)[k] - kelvin_gradient(p, r - dl)[k]) /
                                 (2.0 * h);
                CHECK((e[l][k] - fd2).norm() < 1e-7 * (1.0 + fd2.norm()));
            }
        }
    }
}

TEST_CASE("traction kernel consistency with the conormal derivative") {
    LameParams p(1.0, 1.0);
    auto& rng = test_rng();
    for (int it = 0; it < 20; ++it) {
        const Vec2 x = random_point(rng);
        Vec2 y = random_point(rng);
        if ((x - y).norm() < 0.5) y += Vec2(2.0, 0.0);
        const Vec2 ny = enp_test::random_unit(rng);

        const Mat2 a = traction_kernel(p, x, y, ny);
        for (int b = 0; b < 2; ++b) {
            Vec2 eb = Vec2::Zero();
            eb[b] = 1.0;
            const Vec2 t = traction_fd(
                p, [&](const Vec2& yy) { return Vec2(kelvin_matrix(p, x, yy) * eb); }, y, ny);
            CHECK((a.col(b) - t).norm() < 1e-6 * (1.0 + t.norm()));
        }

        // adjoint kernel differentiates at the target point
        const Vec2 nx = enp_test::random_unit(rng);
        const Mat2 bm = adjoint_traction_kernel(p, x, y, nx);
        for (int b = 0; b < 2; ++b) {
            Vec2 eb = Vec2::Zero();
            eb[b] = 1.0;
            const Vec2 t = traction_fd(
                p, [&](const Vec2& xx) { return Vec2(kelvin_matrix(p, xx, y) * eb); }, x, nx);
            CHECK((bm.col(b) - t).norm() < 1e-6 * (1.0 + t.norm()));
        }
    }
}

TEST_CASE("kernel split structure") {
    LameParams p(1.3, 0.9);
    auto& rng = test_rng();

    SUBCASE("antisymmetry of the Cauchy part and recomposition") {
        for (int it = 0; it < 100; ++it) {
            const Vec2 x = random_point(rng);
            Vec2 y = random_point(rng);
            if ((x - y).norm() < 0.3) y += Vec2(1.5, -0.7);
            const Vec2 ny = enp_test::random_unit(rng);
            const KernelSplit ks = kernel_split(p, x, y, ny);
            CHECK((ks.k1_part + ks.k1_part.transpose()).norm() < 1e-14);
            const Mat2 total = ks.k1_weight * ks.k1_part + ks.k2_part;
            CHECK((total - traction_kernel(p, x, y, ny)).norm() < 1e-14);
        }
    }

    SUBCASE("k2 vanishes when x - y is orthogonal to the normal") {
        for (int it = 0; it < 30; ++it) {
            const Vec2 x = random_point(rng);
            Vec2 d = enp_test::random_unit(rng);
            const Vec2 y = x + 1.3 * d;
            const Vec2 ny(d[1], -d[0]);  // orthogonal to x - y
            const KernelSplit ks = kernel_split(p, x, y, ny);
            CHECK(ks.k2_part.norm() < 1e-14);
        }
    }

    SUBCASE("entry (1,2) of the Cauchy part") {
        // Scalar kernel K(x,y) = -n2(y)(x1-y1) + n1(y)(x2-y2); the stored part
        // is oriented source-to-target, so k1(0,1) = -K(x,y)/(2 pi |x-y|^2).
        for (int it = 0; it < 30; ++it) {
            const Vec2 x = random_point(rng);
            Vec2 y = random_point(rng);
            if ((x - y).norm() < 0.3) y += Vec2(0.0, 2.0);
            const Vec2 ny = enp_test::random_unit(rng);
            const double kscal = -ny[1] * (x[0] - y[0]) + ny[0] * (x[1] - y[1]);
            const KernelSplit ks = kernel_split(p, x, y, ny);
            const double expected = -kscal / (2.0 * kPi * (x - y).squaredNorm());
            CHECK(ks.k1_part(0, 1) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("weak singularity of the bounded part along an analytic curve") {
    LameParams p(1.0, 1.0);
    EllipseGeometry g(2.0, 1.0);
    auto curve = make_ellipse_curve(g, 64);
    const auto& par = curve.parametrization();
    const double t0 = curve.parameter(7);
    const Vec2 x = par.position(t0);

    double bound = 0.0;
    for (int k = 1; k <= 25; ++k) {
        const double t = t0 + std::pow(0.7, k);
        const Vec2 y = par.position(t);
        const Vec2 d1 = par.derivative(t);
        const Vec2 ny = Vec2(d1[1], -d1[0]).normalized();
        const Mat2 k2 = kernel_split(p, x, y, ny).k2_part;
        bound = std::max(bound, k2.norm());
    }
    // approaches the finite coincidence limit
    const Mat2 lim = traction_regular_diagonal(
        p, curve.diag_curvature(7), curve.tangent(7));
    CHECK(bound < 4.0 * (lim.norm() + 1.0));

    // the limit itself matches the approach sequence (parameter offset large
    // enough that the cancellation in x - y stays benign in double precision)
    const double t = t0 + 1e-5;
    const Vec2 y = par.position(t);
    const Vec2 d1 = par.derivative(t);
    const Vec2 ny = Vec2(d1[1], -d1[0]).normalized();
    CHECK((kernel_split(p, x, y, ny).k2_part - lim).norm() < 1e-4);
}
