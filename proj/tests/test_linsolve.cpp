#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "oracles.hpp"
#include "splash2d/linsolve.hpp"

using namespace splash2d;

namespace {

const BranchMap kIdent({0.0, 0.0}, {-1.0, 0.0}, true);
const BranchMap kMap({0.0, 0.0}, {-1.0, 0.0});

struct Manufactured {
    // v* = curl(sin x sin y) + grad(0.1 cos(x + 2y)), q* = cos x sin y.
    static Vec2 v(const Vec2& p) {
        return {std::sin(p.x) * std::cos(p.y) - 0.1 * std::sin(p.x + 2.0 * p.y),
                -std::cos(p.x) * std::sin(p.y) - 0.2 * std::sin(p.x + 2.0 * p.y)};
    }
    static Mat2 grad_v(const Vec2& p) {
        const double c = std::cos(p.x + 2.0 * p.y);
        return {std::cos(p.x) * std::cos(p.y) - 0.1 * c,
                -std::sin(p.x) * std::sin(p.y) - 0.2 * c,
                std::sin(p.x) * std::sin(p.y) - 0.2 * c,
                -std::cos(p.x) * std::cos(p.y) - 0.4 * c};
    }
    static Vec2 lap_v(const Vec2& p) {
        const double s = std::sin(p.x + 2.0 * p.y);
        return {-2.0 * std::sin(p.x) * std::cos(p.y) + 0.5 * s,
                2.0 * std::cos(p.x) * std::sin(p.y) + 1.0 * s};
    }
    static double q(const Vec2& p) { return std::cos(p.x) * std::sin(p.y); }
    static Vec2 grad_q(const Vec2& p) {
        return {-std::sin(p.x) * std::sin(p.y), std::cos(p.x) * std::cos(p.y)};
    }
    static double div_v(const Vec2& p) { return -0.5 * std::cos(p.x + 2.0 * p.y); }
};

struct ManufacturedErrors {
    double ev, eq;
};

ManufacturedErrors manufactured_solve(int n) {
    const Grid g = build_reference_grid(make_circle({0, 0}, 1.0, n), n / 2);
    Params p;
    p.kappa = 0.3;
    p.reynolds = 1.0;
    const double dt = 1.0;
    const double visc = 1.0 - p.kappa;

    LinearRHS rhs;
    rhs.f = zero_vec(g);
    rhs.g = zero_scalar(g);
    rhs.h.assign(static_cast<std::size_t>(g.nb), Vec2{});
    rhs.v0 = zero_vec(g);
    for (int k = 0; k < g.nnodes(); ++k) {
        const std::size_t u = static_cast<std::size_t>(k);
        const Vec2 x = g.nodes[u];
        rhs.f[u] = (p.reynolds / dt) * Manufactured::v(x) - visc * Manufactured::lap_v(x) +
                   Manufactured::grad_q(x);
        rhs.g[u] = Manufactured::div_v(x);
    }
    for (int i = 0; i < g.nb; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        const Vec2 x = g.nodes[u];
        const Mat2 gv = Manufactured::grad_v(x);
        const Mat2 S = visc * (gv + transpose(gv)) - Manufactured::q(x) * Mat2::identity();
        rhs.h[u] = S * g.normals[u];
    }

    LinearSolver solver(g, kIdent, p, dt);
    const auto [v, q] = solver.step(rhs, zero_vec(g));

    VecField dv(v.size());
    ScalarField dq(q.size());
    for (int k = 0; k < g.nnodes(); ++k) {
        const std::size_t u = static_cast<std::size_t>(k);
        dv[u] = v[u] - Manufactured::v(g.nodes[u]);
        dq[u] = q[u] - Manufactured::q(g.nodes[u]);
    }
    return {norm_l2(g, dv), norm_l2(g, dq)};
}

}  // namespace

TEST_CASE("zero data gives the zero solution") {
    const Grid g = build_reference_grid(make_circle({2, 0}, 0.7, 32), 12);
    Params p;
    LinearRHS rhs;
    rhs.f = zero_vec(g);
    rhs.g = zero_scalar(g);
    rhs.h.assign(static_cast<std::size_t>(g.nb), Vec2{});
    rhs.v0 = zero_vec(g);
    const auto [v, q] = solve_linear(g, kMap, rhs, p, 0.01, zero_vec(g));
    CHECK(norm_max(v) < 1e-12);
    CHECK(norm_max(q) < 1e-12);
}

TEST_CASE("discrete round trip: feeding L(v*,q*) back recovers (v*,q*)") {
    const Grid g = build_reference_grid(make_circle({0, 0}, 1.0, 40), 16);
    Params p;
    p.kappa = 0.4;
    const double dt = 0.5;
    const double visc = 1.0 - p.kappa;

    VecField vstar(static_cast<std::size_t>(g.nnodes()));
    for (int k = 0; k < g.nnodes(); ++k) {
        const std::size_t u = static_cast<std::size_t>(k);
        const Vec2 x = g.nodes[u];
        vstar[u] = {std::sin(x.x) * std::cos(x.y), -std::cos(x.x) * std::sin(x.y)};
    }
    // q* must live in the solver's coarse pressure space.
    std::vector<double> qc(static_cast<std::size_t>(coarse_pressure_size(g)));
    for (int c = 0; c < coarse_pressure_size(g); ++c) {
        const Vec2 x = g.nodes[static_cast<std::size_t>(coarse_node_fine_id(g, c))];
        qc[static_cast<std::size_t>(c)] = std::cos(x.x) * std::sin(x.y);
    }
    const ScalarField qstar = prolong_pressure(g, qc);

    // Apply the discrete operator rows to (v*, q*).
    LinearRHS rhs;
    rhs.f = zero_vec(g);
    rhs.g = zero_scalar(g);
    rhs.h.assign(static_cast<std::size_t>(g.nb), Vec2{});
    rhs.v0 = zero_vec(g);
    const TensorField gv = grad_vec(g, vstar);
    const VecField lap = laplacian_vec(g, vstar);
    const VecField gq = grad_scalar(g, qstar);
    for (int k = 0; k < g.nnodes(); ++k) {
        const std::size_t u = static_cast<std::size_t>(k);
        if (!g.is_boundary(k)) rhs.f[u] = (1.0 / dt) * vstar[u] - visc * lap[u] + gq[u];
        rhs.g[u] = trace(gv[u]);
    }
    for (int i = 0; i < g.nb; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        const Mat2 S = visc * (gv[u] + transpose(gv[u])) - qstar[u] * Mat2::identity();
        rhs.h[u] = S * g.normals[u];
    }

    const auto [v, q] = solve_linear(g, kIdent, rhs, p, dt, zero_vec(g));
    for (int k = 0; k < g.nnodes(); ++k) {
        const std::size_t u = static_cast<std::size_t>(k);
        CHECK(norm(v[u] - vstar[u]) < 1e-8);
        CHECK(std::fabs(q[u] - qstar[u]) < 1e-7);
    }
}

TEST_CASE("manufactured solution converges at second order") {
    std::vector<double> hs, ev;
    for (int n : {16, 32, 64}) {
        const ManufacturedErrors e = manufactured_solve(n);
        hs.push_back(std::log(1.0 / n));
        ev.push_back(std::log(e.ev));
    }
    CHECK(oracle::fit_slope(hs, ev) > 1.9);
}

TEST_CASE("identity-map kappa=0 solve matches an independent dense assembly") {
    const Grid g = build_reference_grid(make_circle({0, 0}, 1.0, 20), 8);
    Params p;
    p.kappa = 0.0;
    const double dt = 0.25;
    const int nn = g.nnodes();
    const int nbc = g.nb / 2, nrc = g.nr / 2;
    const int nc = nbc * nrc + 1;
    const int N = 2 * nn + nc;

    LinearRHS rhs;
    rhs.f = zero_vec(g);
    rhs.g = zero_scalar(g);
    rhs.h.assign(static_cast<std::size_t>(g.nb), Vec2{});
    rhs.v0 = zero_vec(g);
    VecField v_prev(static_cast<std::size_t>(nn));
    for (int k = 0; k < nn; ++k) {
        const std::size_t u = static_cast<std::size_t>(k);
        const Vec2 x = g.nodes[u];
        rhs.f[u] = {std::sin(2.0 * x.x), std::cos(x.y)};
        rhs.g[u] = 0.1 * x.x;
        v_prev[u] = {x.y, -x.x};
    }
    for (int i = 0; i < g.nb; ++i) rhs.h[static_cast<std::size_t>(i)] = {0.05, -0.02};

    // Independent reference: dense assembly with the prolongation built from
    // first principles (index-space bilinear weights).
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(nn, nc);
    for (int j = 0; j <= g.nr; ++j) {
        for (int i = 0; i < (j == g.nr ? 1 : g.nb); ++i) {
            const int fine = j == g.nr ? g.pole_id() : j * g.nb + i;
            std::vector<std::pair<int, double>> jw;
            if (j == g.nr)
                jw = {{-1, 1.0}};
            else if (j % 2 == 0)
                jw = {{j / 2, 1.0}};
            else
                jw = {{(j - 1) / 2, 0.5}, {(j + 1) / 2 == nrc ? -1 : (j + 1) / 2, 0.5}};
            std::vector<std::pair<int, double>> iw;
            if (j == g.nr || i % 2 == 0)
                iw = {{i / 2, 1.0}};
            else
                iw = {{(i - 1) / 2, 0.5}, {((i + 1) / 2) % nbc, 0.5}};
            for (auto& [cj, wj] : jw) {
                if (cj == -1) {
                    P(fine, nbc * nrc) += wj;
                    continue;
                }
                for (auto& [ci, wi] : iw) P(fine, cj * nbc + ci) += wj * wi;
            }
        }
    }

    Eigen::MatrixXd Dx = Eigen::MatrixXd::Zero(nn, nn);
    Eigen::MatrixXd Dy = Eigen::MatrixXd::Zero(nn, nn);
    for (int k = 0; k < nn; ++k) {
        for (const auto& e : g.ddx(k)) Dx(k, e.id) += e.w;
        for (const auto& e : g.ddy(k)) Dy(k, e.id) += e.w;
    }
    const Eigen::MatrixXd GxP = Dx * P, GyP = Dy * P;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
    const double visc = 1.0;
    for (int k = 0; k < nn; ++k) {
        const std::size_t u = static_cast<std::size_t>(k);
        if (!g.is_boundary(k)) {
            A(2 * k, 2 * k) += p.reynolds / dt;
            A(2 * k + 1, 2 * k + 1) += p.reynolds / dt;
            for (const auto& e : g.lap(k)) {
                A(2 * k, 2 * e.id) -= visc * e.w;
                A(2 * k + 1, 2 * e.id + 1) -= visc * e.w;
            }
            for (int c = 0; c < nc; ++c) {
                A(2 * k, 2 * nn + c) += GxP(k, c);
                A(2 * k + 1, 2 * nn + c) += GyP(k, c);
            }
            b[2 * k] = rhs.f[u].x + p.reynolds / dt * v_prev[u].x;
            b[2 * k + 1] = rhs.f[u].y + p.reynolds / dt * v_prev[u].y;
        } else {
            const Vec2 m = g.normals[u];
            for (const auto& e : g.ddx(k)) {
                A(2 * k, 2 * e.id) += visc * e.w * (m.x + m.x);
                A(2 * k, 2 * e.id + 1) += visc * e.w * m.y;
                A(2 * k + 1, 2 * e.id + 1) += visc * e.w * m.x;
            }
            for (const auto& e : g.ddy(k)) {
                A(2 * k, 2 * e.id) += visc * e.w * m.y;
                A(2 * k + 1, 2 * e.id) += visc * e.w * m.x;
                A(2 * k + 1, 2 * e.id + 1) += visc * e.w * (m.y + m.y);
            }
            for (int c = 0; c < nc; ++c) {
                A(2 * k, 2 * nn + c) -= m.x * P(k, c);
                A(2 * k + 1, 2 * nn + c) -= m.y * P(k, c);
            }
            b[2 * k] = rhs.h[u].x;
            b[2 * k + 1] = rhs.h[u].y;
        }
    }
    for (int c = 0; c < nc; ++c) {
        const int fn = c == nbc * nrc ? g.pole_id() : (c / nbc) * 2 * g.nb + (c % nbc) * 2;
        for (const auto& e : g.ddx(fn)) A(2 * nn + c, 2 * e.id) += e.w;
        for (const auto& e : g.ddy(fn)) A(2 * nn + c, 2 * e.id + 1) += e.w;
        b[2 * nn + c] = rhs.g[static_cast<std::size_t>(fn)];
    }
    const Eigen::VectorXd x = A.fullPivLu().solve(b);
    const std::vector<double> qcv(x.data() + 2 * nn, x.data() + 2 * nn + nc);
    const ScalarField qref = prolong_pressure(g, qcv);

    const auto [v, q] = solve_linear(g, kIdent, rhs, p, dt, v_prev);
    for (int k = 0; k < nn; ++k) {
        const std::size_t u = static_cast<std::size_t>(k);
        CHECK(std::fabs(v[u].x - x[2 * k]) < 1e-10);
        CHECK(std::fabs(v[u].y - x[2 * k + 1]) < 1e-10);
        CHECK(std::fabs(q[u] - qref[u]) < 1e-10);
    }
}

TEST_CASE("implicit Euler dissipativity with zero data") {
    const Grid g = build_reference_grid(make_circle({2, 0}, 0.7, 40), 16);
    Params p;
    LinearRHS rhs;
    rhs.f = zero_vec(g);
    rhs.g = zero_scalar(g);
    rhs.h.assign(static_cast<std::size_t>(g.nb), Vec2{});
    rhs.v0 = zero_vec(g);
    VecField v_prev(static_cast<std::size_t>(g.nnodes()));
    for (int k = 0; k < g.nnodes(); ++k) {
        const std::size_t u = static_cast<std::size_t>(k);
        const Vec2 x = g.nodes[u];
        v_prev[u] = {0.3 * std::sin(x.x) * std::cos(2.0 * x.y), 0.2 * std::cos(x.x + x.y)};
    }
    const auto [v, q] = solve_linear(g, kMap, rhs, p, 0.05, v_prev);
    CHECK(norm_l2(g, v) <= norm_l2(g, v_prev) * (1.0 + 1e-9));
}

TEST_CASE("build_phi: rest data gives the zero lift") {
    const Grid g = build_reference_grid(make_circle({2, 0}, 0.7, 32), 12);
    Params p;
    const PhiLift lift = build_phi(g, kMap, zero_vec(g), zero_sym(g), p);
    CHECK(norm_max(lift.phi(0.7)) < 1e-12);
    CHECK(norm_max(lift.q_phi) < 1e-12);
    const TensorField zp = lift.zeta_phi(0.9);
    for (const Mat2& m : zp) CHECK(frobenius(m - Mat2::identity()) < 1e-12);
}

TEST_CASE("build_phi: phi(0) equals v0 exactly and the t-weight is t exp(-t^2)") {
    const Grid g = build_reference_grid(make_circle({2, 0}, 0.7, 32), 12);
    Params p;
    VecField v0(static_cast<std::size_t>(g.nnodes()));
    SymField T0(static_cast<std::size_t>(g.nnodes()), Sym2{0.2, 0.05, -0.1});
    for (int k = 0; k < g.nnodes(); ++k) {
        const Vec2 z = kMap.inverse(g.nodes[static_cast<std::size_t>(k)]);
        v0[static_cast<std::size_t>(k)] = 0.2 * perp(z);
    }
    const PhiLift lift = build_phi(g, kMap, v0, T0, p);
    const VecField at0 = lift.phi(0.0);
    for (std::size_t n = 0; n < v0.size(); ++n) CHECK(norm(at0[n] - v0[n]) == 0.0);

    CHECK(PhiLift::a(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    const VecField at1 = lift.phi(1.0);
    for (std::size_t n = 0; n < v0.size(); ++n)
        CHECK(norm(at1[n] - v0[n] - std::exp(-1.0) * lift.phi1[n]) < 1e-14);
}

TEST_CASE("check_lift_compatibility examples") {
    const Grid g = build_reference_grid(make_circle({2, 0}, 0.7, 64), 24);
    Params p;
    LinearRHS rhs;
    rhs.f = zero_vec(g);
    rhs.g = zero_scalar(g);
    rhs.h.assign(static_cast<std::size_t>(g.nb), Vec2{});
    rhs.v0 = zero_vec(g);
    const LiftCompatReport r0 = check_lift_compatibility(g, kMap, rhs, p);
    CHECK(r0.trace_residual == 0.0);
    CHECK(r0.traction_tangential_residual == 0.0);
    CHECK(r0.pass);

    // Self-consistent data: g(0) computed from the same discrete operator.
    VecField v0(static_cast<std::size_t>(g.nnodes()));
    for (int k = 0; k < g.nnodes(); ++k) {
        const Vec2 z = kMap.inverse(g.nodes[static_cast<std::size_t>(k)]);
        v0[static_cast<std::size_t>(k)] = perp(z);
    }
    rhs.v0 = v0;
    const TensorField gv = grad_vec(g, v0);
    for (int k = 0; k < g.nnodes(); ++k) {
        const std::size_t u = static_cast<std::size_t>(k);
        rhs.g[u] = trace(gv[u] * kMap.jacobian(g.nodes[u]));
    }
    // Rigid rotation: symmetric part vanishes analytically, so h(0)=0 remains
    // compatible up to discretization noise.
    const LiftCompatReport r1 = check_lift_compatibility(g, kMap, rhs, p);
    CHECK(r1.trace_residual == 0.0);
    CHECK(r1.traction_tangential_residual < 5e-3);

    // Dropping the g data leaves exactly the discrete trace as the residual.
    double gmax = 0.0;
    for (double v : rhs.g) gmax = std::max(gmax, std::fabs(v));
    LinearRHS rhs2 = rhs;
    rhs2.g = zero_scalar(g);
    const LiftCompatReport r2 = check_lift_compatibility(g, kMap, rhs2, p);
    CHECK(r2.trace_residual == doctest::Approx(gmax).epsilon(1e-12));
}
