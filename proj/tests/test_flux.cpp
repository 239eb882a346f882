#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "splash2d/errors.hpp"
#include "splash2d/flux.hpp"

using namespace splash2d;

namespace {
const BranchMap kMap({0.0, 0.0}, {-1.0, 0.0});
const BranchMap kIdent({0.0, 0.0}, {-1.0, 0.0}, true);

Grid circle_grid(int n = 48, const Vec2& c = {2.0, 0.0}, double r = 0.7) {
    return build_reference_grid(make_circle(c, r, n), n / 2);
}
}  // namespace

TEST_CASE("advance_flux: zero velocity leaves X unchanged") {
    const Grid g = circle_grid();
    const VecField X = identity_flux(g);
    const VecField out = advance_flux(kMap, X, zero_vec(g), 0.05);
    for (std::size_t n = 0; n < X.size(); ++n) CHECK(norm(out[n] - X[n]) == 0.0);
}

TEST_CASE("advance_flux: identity-map mode shifts exactly") {
    const Grid g = circle_grid();
    const VecField X = identity_flux(g);
    VecField v(X.size(), Vec2{1.0, 0.0});
    const VecField out = advance_flux(kIdent, X, v, 0.1);
    for (std::size_t n = 0; n < X.size(); ++n) {
        CHECK(out[n].x - X[n].x == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(out[n].y == X[n].y);
    }
}

TEST_CASE("advance_flux matches the adaptive ODE oracle for constant velocity") {
    const Vec2 c{0.3, -0.2};
    auto rhs = [&](const oracle::State& y, oracle::State& dy, double) {
        const Mat2 j = kMap.jacobian({y[0], y[1]});
        const Vec2 v = j * c;
        dy = {v.x, v.y};
    };
    const oracle::State ref = oracle::integrate(rhs, {1.5, 0.8}, 0.0, 0.1);

    VecField X{{1.5, 0.8}};
    VecField v{c};
    const int steps = 20;
    for (int k = 0; k < steps; ++k) X = advance_flux(kMap, X, v, 0.1 / steps);
    CHECK(std::fabs(X[0].x - ref[0]) < 1e-8);
    CHECK(std::fabs(X[0].y - ref[1]) < 1e-8);
}

TEST_CASE("advance_flux observed order is at least 3.9") {
    // Step sizes large enough that the RK4 error stays well above the
    // oracle's 1e-12 tolerance floor.
    const Vec2 c{0.8, 0.3};
    auto rhs = [&](const oracle::State& y, oracle::State& dy, double) {
        const Mat2 j = kMap.jacobian({y[0], y[1]});
        const Vec2 v = j * c;
        dy = {v.x, v.y};
    };
    const oracle::State ref = oracle::integrate(rhs, {1.2, -0.5}, 0.0, 0.4);

    std::vector<double> hs, errs;
    for (int steps : {2, 4, 8}) {
        VecField X{{1.2, -0.5}};
        VecField v{c};
        for (int k = 0; k < steps; ++k) X = advance_flux(kMap, X, v, 0.4 / steps);
        hs.push_back(std::log(0.4 / steps));
        errs.push_back(std::log(std::hypot(X[0].x - ref[0], X[0].y - ref[1])));
    }
    CHECK(oracle::fit_slope(hs, errs) > 3.9);
}

TEST_CASE("advance_flux raises at the branch point") {
    VecField X{{0.0, 0.0}};
    VecField v{{1.0, 0.0}};
    CHECK_THROWS_AS(advance_flux(kMap, X, v, 0.01), SingularJacobian);
}

TEST_CASE("compute_zeta: identity, dilation, rotation") {
    const Grid g = circle_grid();
    const TensorField zi = compute_zeta(g, identity_flux(g));
    for (const Mat2& m : zi) CHECK(frobenius(m - Mat2::identity()) < 1e-10);

    VecField dil(identity_flux(g));
    for (Vec2& p : dil) p = 2.0 * p;
    const TensorField zd = compute_zeta(g, dil);
    for (const Mat2& m : zd) CHECK(frobenius(m - 0.5 * Mat2::identity()) < 1e-10);

    const double th = 0.37;
    const Mat2 rot{std::cos(th), -std::sin(th), std::sin(th), std::cos(th)};
    VecField rx(identity_flux(g));
    for (Vec2& p : rx) p = rot * p;
    const TensorField zr = compute_zeta(g, rx);
    for (const Mat2& m : zr) CHECK(frobenius(m - transpose(rot)) < 1e-9);
}

TEST_CASE("compute_zeta inverts the discrete gradient away from the boundary") {
    const Grid g = circle_grid(64);
    VecField X(identity_flux(g));
    for (Vec2& p : X) {
        const Vec2 q = p;
        p.x += 0.05 * std::sin(q.x) * std::cos(q.y);
        p.y += 0.05 * std::cos(q.x * 0.5);
    }
    const TensorField zeta = compute_zeta(g, X);
    const TensorField gx = grad_vec(g, X);
    for (std::size_t n = 0; n < zeta.size(); ++n)
        CHECK(frobenius(zeta[n] * gx[n] - Mat2::identity()) < 1e-10);
}

TEST_CASE("compute_zeta detects folding") {
    const Grid g = circle_grid();
    VecField X(static_cast<std::size_t>(g.nnodes()), Vec2{1.0, 1.0});  // constant map
    CHECK_THROWS_AS(compute_zeta(g, X), MeshFoldError);
}

TEST_CASE("cofactor_gradient algebra and determinant identity") {
    const Mat2 m{1.3, -0.4, 0.2, 0.9};
    const Mat2 c = cofactor(m);
    CHECK(c.a11 == doctest::Approx(0.9));
    CHECK(c.a12 == doctest::Approx(-0.2));
    CHECK(c.a21 == doctest::Approx(0.4));
    CHECK(c.a22 == doctest::Approx(1.3));

    const Grid g = circle_grid();
    const TensorField ci = cofactor_gradient(g, identity_flux(g));
    for (const Mat2& t : ci) CHECK(frobenius(t - Mat2::identity()) < 1e-10);

    VecField X(identity_flux(g));
    for (Vec2& p : X) {
        p.x += 0.04 * std::sin(p.y * 2.0);
        p.y += 0.04 * std::cos(p.x);
    }
    const TensorField cg = cofactor_gradient(g, X);
    const TensorField gx = grad_vec(g, X);
    for (std::size_t n = 0; n < cg.size(); ++n)
        CHECK(det(cg[n]) == doctest::Approx(det(gx[n])).epsilon(1e-12));
}

TEST_CASE("physical volume is conserved along rigid rotation") {
    // Rigid rotation about the physical origin: u = omega * perp(z), i.e.
    // v(t, node) = omega * perp(P^{-1}(X)).
    const Grid g = circle_grid(48);
    const double omega = 0.8, T = 0.4;
    const int steps = 80;
    VecField X = identity_flux(g);
    for (int k = 0; k < steps; ++k) {
        VecField v(X.size());
        for (std::size_t n = 0; n < X.size(); ++n) v[n] = omega * perp(kMap.inverse(X[n]));
        X = advance_flux(kMap, X, v, T / steps);
    }
    // det of the physical pullback F = J(X)^{-1} grad X J(labels) stays 1.
    const TensorField gx = grad_vec(g, X);
    for (int n = 0; n < g.nnodes(); ++n) {
        const std::size_t u0 = static_cast<std::size_t>(n);
        const double detf =
            det(gx[u0]) * kMap.q_squared(g.nodes[u0]) / kMap.q_squared(X[u0]);
        CHECK(std::fabs(detf - 1.0) < 5e-3);
    }
}
