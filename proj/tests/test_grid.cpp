#include <doctest.h>

#include <cmath>

#include "splash2d/errors.hpp"
#include "splash2d/fields.hpp"
#include "splash2d/grid.hpp"

using namespace splash2d;

TEST_CASE("circle grid: boundary layer coincides with markers") {
    const auto curve = make_circle({0, 0}, 1.0, 32);
    const Grid g = build_reference_grid(curve, 16);
    CHECK(g.nb == 32);
    for (int i = 0; i < 32; ++i)
        CHECK(norm(g.nodes[static_cast<std::size_t>(i)] -
                   curve.markers[static_cast<std::size_t>(i)]) == 0.0);
    // Outward normals on the unit circle point radially.
    for (int i = 0; i < 32; ++i) {
        const Vec2 n = g.normals[static_cast<std::size_t>(i)];
        const Vec2 r = curve.markers[static_cast<std::size_t>(i)];
        CHECK(dot(n, r) == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("ellipse grid: all cell Jacobians positive") {
    const auto curve = make_ellipse({0, 0}, 2.0, 1.0, 64);
    const Grid g = build_reference_grid(curve, 24);
    for (double j : g.cell_jacobians()) CHECK(j > 0.0);
}

TEST_CASE("figure-eight curve is rejected") {
    std::vector<Vec2> pts;
    for (int i = 0; i < 64; ++i) {
        const double t = 2.0 * M_PI * i / 64;
        pts.push_back({std::sin(2.0 * t), std::sin(t)});
    }
    CHECK_THROWS_AS(build_reference_grid(InterfaceCurve(pts), 8), GeometryError);
}

TEST_CASE("interpolation: constants, linears, out-of-domain") {
    const auto curve = make_ellipse({0.3, -0.2}, 1.5, 0.9, 48);
    const Grid g = build_reference_grid(curve, 16);

    ScalarField c(static_cast<std::size_t>(g.nnodes()), 4.25);
    CHECK(interpolate(g, c, {0.3, -0.2}) == doctest::Approx(4.25).epsilon(1e-14));
    CHECK(interpolate(g, c, {1.0, 0.1}) == doctest::Approx(4.25).epsilon(1e-14));

    ScalarField lin(static_cast<std::size_t>(g.nnodes()));
    for (int n = 0; n < g.nnodes(); ++n)
        lin[static_cast<std::size_t>(n)] = g.nodes[static_cast<std::size_t>(n)].x;
    for (const Vec2 p : {Vec2{0.5, 0.1}, Vec2{-0.4, -0.5}, Vec2{1.2, 0.0}})
        CHECK(interpolate(g, lin, p) == doctest::Approx(p.x).epsilon(1e-12));

    CHECK_THROWS_AS(interpolate(g, c, {5.0, 5.0}), OutOfDomain);
}

TEST_CASE("interpolation converges at second order on smooth fields") {
    std::vector<double> errs;
    std::vector<double> hs;
    for (int n : {24, 48, 96}) {
        const auto curve = make_circle({0, 0}, 1.0, n);
        const Grid g = build_reference_grid(curve, n / 2);
        ScalarField f(static_cast<std::size_t>(g.nnodes()));
        for (int k = 0; k < g.nnodes(); ++k) {
            const Vec2 p = g.nodes[static_cast<std::size_t>(k)];
            f[static_cast<std::size_t>(k)] = std::sin(p.x) * std::cos(p.y);
        }
        double emax = 0.0;
        for (int s = 0; s < 40; ++s) {
            const double th = 2.0 * M_PI * s / 40.0;
            const Vec2 p{0.53 * std::cos(th) + 0.11, 0.53 * std::sin(th)};
            emax = std::max(emax,
                            std::fabs(interpolate(g, f, p) - std::sin(p.x) * std::cos(p.y)));
        }
        errs.push_back(emax);
        hs.push_back(2.0 * M_PI / n);
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    CHECK(order1 > 1.7);
    CHECK(order2 > 1.7);
}

TEST_CASE("gradient and laplacian stencils are second order") {
    std::vector<double> egrad, elap;
    for (int n : {32, 64, 128}) {
        const auto curve = make_ellipse({0, 0}, 1.3, 0.9, n);
        const Grid g = build_reference_grid(curve, n / 2);
        ScalarField f(static_cast<std::size_t>(g.nnodes()));
        for (int k = 0; k < g.nnodes(); ++k) {
            const Vec2 p = g.nodes[static_cast<std::size_t>(k)];
            f[static_cast<std::size_t>(k)] = std::sin(p.x) * std::cos(p.y);
        }
        const VecField gr = grad_scalar(g, f);
        const ScalarField lp = laplacian_scalar(g, f);
        double eg = 0.0, el = 0.0;
        for (int k = 0; k < g.nnodes(); ++k) {
            const Vec2 p = g.nodes[static_cast<std::size_t>(k)];
            const Vec2 gex{std::cos(p.x) * std::cos(p.y), -std::sin(p.x) * std::sin(p.y)};
            eg = std::max(eg, norm(gr[static_cast<std::size_t>(k)] - gex));
            el = std::max(el, std::fabs(lp[static_cast<std::size_t>(k)] -
                                        (-2.0 * std::sin(p.x) * std::cos(p.y))));
        }
        egrad.push_back(eg);
        elap.push_back(el);
    }
    CHECK(std::log2(egrad[0] / egrad[1]) > 1.6);
    CHECK(std::log2(egrad[1] / egrad[2]) > 1.6);
    // The pole stencil is least-squares quadratic; the max-norm order dips
    // toward first order there while the field error stays tiny.
    CHECK(std::log2(elap[0] / elap[1]) > 0.9);
    CHECK(elap.back() < 2e-2);
}

TEST_CASE("quadrature weights sum to the polygon area") {
    const auto curve = make_circle({0, 0}, 1.0, 128);
    const Grid g = build_reference_grid(curve, 32);
    double sum = 0.0;
    for (double w : g.node_weight) sum += w;
    const double poly_area = 0.5 * 128 * std::sin(2.0 * M_PI / 128);
    CHECK(sum == doctest::Approx(poly_area).epsilon(1e-12));
}
