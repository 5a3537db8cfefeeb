#include <cmath>
#include <numbers>

#include "doctest.h"
#include "elastonp/core_types.hpp"
#include "test_oracles.hpp"

using namespace elastonp;
using enp_test::adaptive_quadrature;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("LameParams derived constants and rejection") {
    LameParams p(1.0, 1.0);
    CHECK(p.alpha1() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(p.alpha2() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(p.kolosov() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.k0() == doctest::Approx(1.0 / 6.0).epsilon(1e-15));

    CHECK_THROWS_AS(LameParams(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(LameParams(1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(LameParams(-2.0, 1.0), std::invalid_argument);  // lambda + mu <= 0

    // 0 < k0 < 1/2 across a sweep of admissible pairs, alpha2 > 0
    for (double lam : {-0.9, -0.5, 0.0, 0.3, 1.0, 5.0, 40.0}) {
        for (double mu : {0.05, 1.0, 3.0}) {
            if (!(lam + mu > 0.0)) continue;
            LameParams q(lam, mu);
            CHECK(q.k0() > 0.0);
            CHECK(q.k0() < 0.5);
            CHECK(q.alpha2() > 0.0);
        }
    }
}

TEST_CASE("elliptic coordinate map") {
    EllipseGeometry g(std::cosh(1.0), std::sinh(1.0));  // R = 1, rho0 = 1
    CHECK(g.focal_scale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.rho0 == doctest::Approx(1.0).epsilon(1e-12));

    SUBCASE("axis points") {
        Vec2 x = elliptic_to_cartesian(g, 0.0, 0.0);
        CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(x[1] == doctest::Approx(0.0));
        Vec2 v = elliptic_to_cartesian(g, g.rho0, kPi / 2.0);
        CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(v[1] == doctest::Approx(g.b).epsilon(1e-15));
    }

    SUBCASE("direct evaluation oracle, R=2") {
        EllipseGeometry g2(2.0 * std::cosh(1.0), 2.0 * std::sinh(1.0));
        const Vec2 x = elliptic_to_cartesian(g2, 1.0, kPi / 4.0);
        // independent scalar evaluation through exp()
        const long double e1 = std::exp(1.0L);
        const long double ch = (e1 + 1.0L / e1) / 2.0L, sh = (e1 - 1.0L / e1) / 2.0L;
        const long double c = std::sqrt(0.5L);
        CHECK(x[0] == doctest::Approx(static_cast<double>(2.0L * ch * c)).epsilon(1e-14));
        CHECK(x[1] == doctest::Approx(static_cast<double>(2.0L * sh * c)).epsilon(1e-14));
    }

    SUBCASE("inverse on-axis") {
        EllipticCoords c = cartesian_to_elliptic(g, Vec2(std::cosh(1.0), 0.0));
        CHECK(c.rho == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(c.omega) < 1e-12);
    }

    SUBCASE("round trip grid") {
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                const double rho = 0.1 + 0.35 * i;
                const double om = 2.0 * kPi * (j + 0.3) / 10.0;
                const Vec2 x = elliptic_to_cartesian(g, rho, om);
                const EllipticCoords c = cartesian_to_elliptic(g, x);
                CHECK(c.rho == doctest::Approx(rho).epsilon(1e-12));
                const Vec2 back = elliptic_to_cartesian(g, c.rho, c.omega);
                CHECK((back - x).norm() <= 1e-12 * (1.0 + x.norm()));
            }
        }
    }

    SUBCASE("newton oracle, R=2 at (3,1)") {
        EllipseGeometry g2(2.0 * std::cosh(1.0), 2.0 * std::sinh(1.0));
        const EllipticCoords c = cartesian_to_elliptic(g2, Vec2(3.0, 1.0));
        double rho = 0.0, om = 0.0;
        REQUIRE(enp_test::invert_elliptic_newton(2.0, Vec2(3.0, 1.0), 1.0, 0.4, rho, om));
        CHECK(c.rho == doctest::Approx(rho).epsilon(1e-11));
        CHECK(c.omega == doctest::Approx(om).epsilon(1e-11));
    }

    SUBCASE("focal segment rejected") {
        CHECK_THROWS_AS(cartesian_to_elliptic(g, Vec2(0.5, 0.0)), std::domain_error);
        CHECK_THROWS_AS(cartesian_to_elliptic(g, Vec2(0.0, 0.0)), std::domain_error);
    }
}

TEST_CASE("disk curve") {
    auto c16 = make_disk_curve(1.0, 16);
    for (int k = 0; k < 16; ++k)
        CHECK(c16.weight(k) == doctest::Approx(2.0 * kPi / 16.0).epsilon(1e-15));

    auto c = make_disk_curve(1.0, 64);
    CHECK(c.perimeter() == doctest::Approx(2.0 * kPi).epsilon(1e-14));
    // normal at theta = pi/2 is (0,1)
    CHECK(c.normal(16)[0] == doctest::Approx(0.0));
    CHECK(c.normal(16)[1] == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(make_disk_curve(1.0, 15), std::invalid_argument);
    CHECK_THROWS_AS(make_disk_curve(1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(make_disk_curve(-1.0, 64), std::invalid_argument);
}

TEST_CASE("ellipse curve") {
    CHECK_THROWS_AS(EllipseGeometry(1.0, 1.0), std::invalid_argument);  // degenerate a = b

    EllipseGeometry g(2.0, 1.0);
    auto c = make_ellipse_curve(g, 64);

    // normals unit, weights positive
    for (int k = 0; k < c.size(); ++k) {
        CHECK(std::abs(c.normal(k).norm() - 1.0) < 1e-12);
        CHECK(c.weight(k) > 0.0);
    }
    CHECK(c.normal(0)[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(c.normal(0)[1]) < 1e-14);

    // perimeter against adaptive quadrature of the metric
    const double per = adaptive_quadrature(
        [&](double w) { return g.boundary_metric(w); }, 0.0, 2.0 * kPi, 1e-14);
    CHECK(std::abs(c.perimeter() - per) < 1e-10);

    // weights are h0(w_k) * 2pi/n
    for (int k = 0; k < c.size(); ++k)
        CHECK(c.weight(k) ==
              doctest::Approx(g.boundary_metric(c.parameter(k)) * 2.0 * kPi / 64.0).epsilon(1e-13));

    // spectral convergence of the perimeter: error at n at least halves per doubling
    double prev = std::abs(make_ellipse_curve(g, 16).perimeter() - per);
    for (int n : {32, 64}) {
        const double err = std::abs(make_ellipse_curve(g, n).perimeter() - per);
        CHECK(err <= 0.5 * prev + 1e-14);
        prev = err;
    }
}

TEST_CASE("fit_line recovers a known slope") {
    VecX x(5), y(5);
    for (int i = 0; i < 5; ++i) {
        x[i] = i;
        y[i] = 3.5 - 2.0 * i;
    }
    auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(f.intercept == doctest::Approx(3.5).epsilon(1e-13));
    CHECK(f.rms_residual < 1e-13);
}
