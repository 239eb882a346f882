#include "splash2d/picard.hpp"

#include <algorithm>
#include <cmath>

#include "splash2d/flux.hpp"
#include "splash2d/stress.hpp"

namespace splash2d {

namespace {

/// (div tau)_k = sum_{l,m} (d_l T_{km}) B_{lm} with B = zeta J^P(X).
VecField stress_divergence(const Grid& g, const SymField& T, const TensorField& B) {
    const SymGrad gt = grad_sym(g, T);
    VecField out(T.size());
    for (std::size_t n = 0; n < T.size(); ++n) {
        const Mat2& b = B[n];
        out[n].x = gt.g11[n].x * b.a11 + gt.g11[n].y * b.a21 + gt.g12[n].x * b.a12 +
                   gt.g12[n].y * b.a22;
        out[n].y = gt.g12[n].x * b.a11 + gt.g12[n].y * b.a21 + gt.g22[n].x * b.a12 +
                   gt.g22[n].y * b.a22;
    }
    return out;
}

struct LaggedLevel {
    VecField v;          // full velocity w + phi
    TensorField grad_v;
    ScalarField q;       // full pressure q_w + q_phi
    VecField grad_q;
    SymField T;
    TensorField zeta;
    TensorField jx;      // J^P at X
    ScalarField q2x;     // Q^2 at X
    TensorField cof;     // cofactor gradient of X
    VecField w;
    TensorField grad_w;
};

LaggedLevel lag_level(const PicardContext& ctx, const IterationState& prev, int level) {
    const Grid& g = *ctx.grid;
    LaggedLevel L;
    const double t = ctx.time(level);
    const VecField phi = ctx.lift.phi(t);
    const std::size_t nn = static_cast<std::size_t>(g.nnodes());

    L.w = prev.w[static_cast<std::size_t>(level)];
    L.v.resize(nn);
    for (std::size_t n = 0; n < nn; ++n) L.v[n] = L.w[n] + phi[n];
    L.grad_v = grad_vec(g, L.v);
    L.grad_w = grad_vec(g, L.w);

    L.q.resize(nn);
    for (std::size_t n = 0; n < nn; ++n)
        L.q[n] = prev.qw[static_cast<std::size_t>(level)][n] + ctx.lift.q_phi[n];
    L.grad_q = grad_scalar(g, L.q);

    L.T = prev.T[static_cast<std::size_t>(level)];
    const VecField& X = prev.X[static_cast<std::size_t>(level)];
    L.zeta = compute_zeta(g, X, ctx.params.fold_tol);
    L.cof = cofactor_gradient(g, X);
    L.jx.resize(nn);
    L.q2x.resize(nn);
    for (std::size_t n = 0; n < nn; ++n) {
        L.jx[n] = ctx.map.jacobian(X[n]);
        L.q2x[n] = ctx.map.q_squared(X[n]);
    }
    return L;
}

}  // namespace

VecField PicardContext::full_velocity(const IterationState& s, int k) const {
    const VecField phi = lift.phi(time(k));
    VecField out(s.w[static_cast<std::size_t>(k)].size());
    for (std::size_t n = 0; n < out.size(); ++n)
        out[n] = s.w[static_cast<std::size_t>(k)][n] + phi[n];
    return out;
}

ScalarField PicardContext::full_pressure(const IterationState& s, int k) const {
    ScalarField out(s.qw[static_cast<std::size_t>(k)].size());
    for (std::size_t n = 0; n < out.size(); ++n)
        out[n] = s.qw[static_cast<std::size_t>(k)][n] + lift.q_phi[n];
    return out;
}

PicardContext make_picard_context(const Grid& g, const BranchMap& map, const Params& p,
                                  const VecField& v0, const SymField& T0, const VecField& x0,
                                  double t_horizon, bool newtonian,
                                  const std::optional<VecField>& analytic_g0) {
    p.validate();
    PicardContext ctx;
    ctx.grid = &g;
    ctx.map = map;
    ctx.params = p;
    ctx.newtonian = newtonian;
    ctx.dt = p.dt;
    ctx.levels = std::max(2, static_cast<int>(std::round(t_horizon / p.dt)) + 1);
    ctx.lift = build_phi(g, map, v0, T0, p, analytic_g0);
    ctx.solver = std::make_shared<LinearSolver>(g, map, p, p.dt);
    ctx.x_init = x0;
    ctx.T_init = T0;
    return ctx;
}

double max_horizon(const Params& p) {
    if (p.weissenberg <= 0.0) throw ParamError("max_horizon: weissenberg must be > 0");
    return std::pow(p.c_cal * p.weissenberg / (1.0 + p.weissenberg), 1.0 / p.mu_cal);
}

VecField FPieces::total() const {
    VecField out(w.size());
    for (std::size_t n = 0; n < w.size(); ++n)
        out[n] = w[n] + phi[n] + q[n] + T[n] + phiL[n];
    return out;
}

ScalarField GPieces::total() const {
    ScalarField out(gbar.size());
    for (std::size_t n = 0; n < gbar.size(); ++n) out[n] = gbar[n] + phiL[n];
    return out;
}

std::vector<Vec2> HPieces::total() const {
    std::vector<Vec2> out(w.size());
    for (std::size_t n = 0; n < w.size(); ++n)
        out[n] = w[n] + wT[n] + phi[n] + phiT[n] + q[n] + T[n] + phiL[n];
    return out;
}

FPieces assemble_f(const PicardContext& ctx, const IterationState& prev, int level) {
    const Grid& g = *ctx.grid;
    const std::size_t nn = static_cast<std::size_t>(g.nnodes());
    const double t = ctx.time(level);
    const double visc = 1.0 - ctx.params.kappa;
    const LaggedLevel L = lag_level(ctx, prev, level);

    FPieces out;
    out.w.assign(nn, Vec2{});
    out.phi.assign(nn, Vec2{});
    out.q.assign(nn, Vec2{});
    out.T.assign(nn, Vec2{});
    out.phiL.assign(nn, Vec2{});

    const VecField phi = ctx.lift.phi(t);
    const VecField dphi = ctx.lift.dphi_dt(t);

    const VecField lap_w = laplacian_vec(g, L.w);
    const VecField zlap_w = flux_laplacian(g, prev.X[static_cast<std::size_t>(level)], L.w);
    const VecField lap_phi = laplacian_vec(g, phi);
    const VecField zlap_phi = flux_laplacian(g, prev.X[static_cast<std::size_t>(level)], phi);

    TensorField B(nn);  // zeta J^P(X)
    for (std::size_t n = 0; n < nn; ++n) B[n] = L.zeta[n] * L.jx[n];
    const VecField divT = ctx.newtonian ? VecField(nn) : stress_divergence(g, L.T, B);

    for (std::size_t n = 0; n < nn; ++n) {
        const Mat2 jl = ctx.map.jacobian(g.nodes[n]);
        const double q2l = ctx.map.q_squared(g.nodes[n]);
        out.w[n] = visc * (L.q2x[n] * zlap_w[n] - q2l * lap_w[n]);
        out.phi[n] = visc * (L.q2x[n] * zlap_phi[n] - q2l * lap_phi[n]);
        out.q[n] = transpose(jl) * L.grad_q[n] -
                   transpose(L.jx[n]) * (transpose(L.zeta[n]) * L.grad_q[n]);
        if (!ctx.newtonian) out.T[n] = divT[n];
        out.phiL[n] = -ctx.params.reynolds * dphi[n] + visc * q2l * lap_phi[n] -
                      transpose(jl) * ctx.lift.grad_q_phi[n];
    }
    return out;
}

GPieces assemble_g(const PicardContext& ctx, const IterationState& prev, int level) {
    const Grid& g = *ctx.grid;
    const std::size_t nn = static_cast<std::size_t>(g.nnodes());
    const double t = ctx.time(level);
    const LaggedLevel L = lag_level(ctx, prev, level);

    const TensorField grad_phi = ctx.lift.grad_phi(t);
    const TensorField zeta_phi = ctx.lift.zeta_phi(t);
    const TensorField jp_phi = ctx.lift.jp_phi(ctx.map, g, t);

    GPieces out;
    out.gbar.assign(nn, 0.0);
    out.phiL.assign(nn, 0.0);
    for (std::size_t n = 0; n < nn; ++n) {
        const Mat2 jl = ctx.map.jacobian(g.nodes[n]);
        const double gtilde = trace(L.grad_v[n] * jl) - trace(L.grad_v[n] * L.zeta[n] * L.jx[n]);
        const double corr = trace(grad_phi[n] * zeta_phi[n] * jp_phi[n]) -
                            trace(grad_phi[n] * jl);
        out.gbar[n] = gtilde + corr;
        out.phiL[n] = -trace(grad_phi[n] * zeta_phi[n] * jp_phi[n]);
    }
    return out;
}

HPieces assemble_h(const PicardContext& ctx, const IterationState& prev, int level) {
    const Grid& g = *ctx.grid;
    const std::size_t nb = static_cast<std::size_t>(g.nb);
    const double t = ctx.time(level);
    const double visc = 1.0 - ctx.params.kappa;
    const LaggedLevel L = lag_level(ctx, prev, level);
    const TensorField grad_phi = ctx.lift.grad_phi(t);

    HPieces out;
    out.w.assign(nb, Vec2{});
    out.wT.assign(nb, Vec2{});
    out.phi.assign(nb, Vec2{});
    out.phiT.assign(nb, Vec2{});
    out.q.assign(nb, Vec2{});
    out.T.assign(nb, Vec2{});
    out.phiL.assign(nb, Vec2{});

    for (std::size_t i = 0; i < nb; ++i) {
        const Vec2 n0 = g.normals[i];
        const Mat2 jl = ctx.map.jacobian(g.nodes[i]);
        const Vec2 ml = inverse(jl) * n0;
        const Vec2 cn = L.cof[i] * n0;          // grad_Lambda X n0
        const Vec2 mx = inverse(L.jx[i]) * cn;  // (J^P(X))^{-1} grad_Lambda X n0

        const Mat2 dwj_l = L.grad_w[i] * jl;
        const Mat2 dwj_x = L.grad_w[i] * L.zeta[i] * L.jx[i];
        out.w[i] = visc * (L.grad_w[i] * n0 - L.grad_w[i] * (L.zeta[i] * cn));
        out.wT[i] = visc * (transpose(dwj_l) * ml - transpose(dwj_x) * mx);

        const Mat2 dpj_l = grad_phi[i] * jl;
        const Mat2 dpj_x = grad_phi[i] * L.zeta[i] * L.jx[i];
        out.phi[i] = visc * (grad_phi[i] * n0 - grad_phi[i] * (L.zeta[i] * cn));
        out.phiT[i] = visc * (transpose(dpj_l) * ml - transpose(dpj_x) * mx);

        out.q[i] = L.q[i] * (mx - ml);
        if (!ctx.newtonian) out.T[i] = -1.0 * (L.T[i].full() * mx);
        out.phiL[i] = ctx.lift.q_phi[i] * ml - visc * ((dpj_l + transpose(dpj_l)) * ml);
    }
    return out;
}

IterationState seed_state(const PicardContext& ctx) {
    const Grid& g = *ctx.grid;
    IterationState s;
    const std::size_t K = static_cast<std::size_t>(ctx.levels);
    s.w.assign(K, zero_vec(g));
    s.qw.assign(K, zero_scalar(g));
    s.T.assign(K, ctx.T_init);
    s.X.assign(K, ctx.x_init);
    return s;
}

namespace {

IterationState::NormLedger diff_ledger(const PicardContext& ctx, const IterationState& a,
                                       const IterationState& b) {
    const Grid& g = *ctx.grid;
    IterationState::NormLedger led;
    double acc_v = 0.0, acc_q = 0.0;
    const int K = ctx.levels;
    for (int k = 0; k < K; ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        VecField dw(a.w[ku].size());
        for (std::size_t n = 0; n < dw.size(); ++n) dw[n] = a.w[ku][n] - b.w[ku][n];
        ScalarField dq(a.qw[ku].size());
        for (std::size_t n = 0; n < dq.size(); ++n) dq[n] = a.qw[ku][n] - b.qw[ku][n];
        VecField dX(a.X[ku].size());
        for (std::size_t n = 0; n < dX.size(); ++n) dX[n] = a.X[ku][n] - b.X[ku][n];
        SymField dT(a.T[ku].size());
        for (std::size_t n = 0; n < dT.size(); ++n) dT[n] = a.T[ku][n] - b.T[ku][n];

        const double wquad = (k == 0 || k == K - 1) ? 0.5 : 1.0;
        const double hv = norm_h1(g, dw);
        const double hq = norm_l2(g, dq);
        acc_v += wquad * ctx.dt * hv * hv;
        acc_q += wquad * ctx.dt * hq * hq;
        led.flux = std::max(led.flux, norm_h1(g, dX));
        led.stress = std::max(led.stress, norm_l2(g, dT));
    }
    led.velocity = std::sqrt(acc_v);
    led.pressure = std::sqrt(acc_q);
    return led;
}

}  // namespace

IterationState picard_sweep(const PicardContext& ctx, const IterationState& prev) {
    const Grid& g = *ctx.grid;
    const std::size_t nn = static_cast<std::size_t>(g.nnodes());
    IterationState next;
    next.w.resize(static_cast<std::size_t>(ctx.levels));
    next.qw.resize(static_cast<std::size_t>(ctx.levels));
    next.T.resize(static_cast<std::size_t>(ctx.levels));
    next.X.resize(static_cast<std::size_t>(ctx.levels));
    next.w[0] = zero_vec(g);
    next.qw[0] = zero_scalar(g);
    next.T[0] = ctx.T_init;
    next.X[0] = ctx.x_init;

    // Lagged physical velocity gradients for the stress coefficient A and the
    // lagged full velocities for the flux quadrature.
    std::vector<TensorField> A_lag;
    std::vector<VecField> v_lag(static_cast<std::size_t>(ctx.levels));
    if (!ctx.newtonian) A_lag.resize(static_cast<std::size_t>(ctx.levels));
    for (int k = 0; k < ctx.levels; ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        v_lag[ku] = ctx.full_velocity(prev, k);
        if (!ctx.newtonian) {
            const TensorField zeta = compute_zeta(g, prev.X[ku], ctx.params.fold_tol);
            const TensorField gv = grad_vec(g, v_lag[ku]);
            TensorField A(nn);
            for (std::size_t n = 0; n < nn; ++n)
                A[n] = gv[n] * zeta[n] * ctx.map.jacobian(prev.X[ku][n]);
            A_lag[ku] = std::move(A);
        }
    }

    for (int k = 1; k < ctx.levels; ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);

        // Linear solve for (w, q_w) at t_k with data assembled from the
        // lagged iterate at the same level.
        LinearRHS rhs;
        rhs.f = assemble_f(ctx, prev, k).total();
        rhs.g = assemble_g(ctx, prev, k).total();
        rhs.h = assemble_h(ctx, prev, k).total();
        rhs.v0 = ctx.lift.v0;
        auto [w_new, q_new] = ctx.solver->step(rhs, next.w[ku - 1]);
        next.w[ku] = std::move(w_new);
        next.qw[ku] = std::move(q_new);

        // Stress: RK2 with the lagged coefficient frozen at the midpoint.
        if (ctx.newtonian) {
            next.T[ku] = next.T[ku - 1];
        } else {
            TensorField A_mid(nn);
            for (std::size_t n = 0; n < nn; ++n)
                A_mid[n] = 0.5 * (A_lag[ku - 1][n] + A_lag[ku][n]);
            next.T[ku] = advance_stress_frozen(next.T[ku - 1], A_mid, ctx.params.weissenberg,
                                               ctx.params.kappa, ctx.dt);
        }

        // Flux: RK4 with the lagged midpoint velocity.
        VecField v_mid(nn);
        for (std::size_t n = 0; n < nn; ++n)
            v_mid[n] = 0.5 * (v_lag[ku - 1][n] + v_lag[ku][n]);
        next.X[ku] = advance_flux(ctx.map, next.X[ku - 1], v_mid, ctx.dt);
        compute_zeta(g, next.X[ku], ctx.params.fold_tol);  // fail fast on folding
    }

    next.ledger = diff_ledger(ctx, next, prev);
    return next;
}

ConvergeResult run_to_convergence(const PicardContext& ctx) {
    ContractionReport report;
    IterationState state = seed_state(ctx);
    bool converged = false;
    for (int sweep = 0; sweep < ctx.params.max_sweeps; ++sweep) {
        IterationState next = picard_sweep(ctx, state);
        const double diff = next.ledger.composite();
        report.diffs.push_back(diff);
        state = std::move(next);
        ++report.sweeps;
        if (diff < ctx.params.tol_picard) {
            converged = true;
            break;
        }
    }
    for (std::size_t k = 0; k + 1 < report.diffs.size(); ++k) {
        if (report.diffs[k] > 0.0) report.ratios.push_back(report.diffs[k + 1] / report.diffs[k]);
    }
    if (!report.ratios.empty()) report.final_ratio = report.ratios.back();
    report.contracting = report.ratios.empty() ? converged : report.final_ratio < 1.0;
    report.converged = converged;
    if (!converged) throw NoContraction(report);

    ConvergeResult out{std::move(state), std::move(report), {}};
    out.residuals = equation_residuals(ctx, out.state);
    return out;
}

ResidualReport equation_residuals(const PicardContext& ctx, const IterationState& s) {
    const Grid& g = *ctx.grid;
    const std::size_t nn = static_cast<std::size_t>(g.nnodes());
    const double visc = 1.0 - ctx.params.kappa;
    const double we = ctx.params.weissenberg;
    ResidualReport rep;

    VecField v_prev = ctx.full_velocity(s, 0);
    TensorField A_prev;
    if (!ctx.newtonian) {
        const TensorField zeta0 = compute_zeta(g, s.X[0], ctx.params.fold_tol);
        const TensorField gv0 = grad_vec(g, v_prev);
        A_prev.resize(nn);
        for (std::size_t n = 0; n < nn; ++n)
            A_prev[n] = gv0[n] * zeta0[n] * ctx.map.jacobian(s.X[0][n]);
    }

    for (int k = 1; k < ctx.levels; ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        const VecField v = ctx.full_velocity(s, k);
        const TensorField zeta = compute_zeta(g, s.X[ku], ctx.params.fold_tol);
        const TensorField cof = cofactor_gradient(g, s.X[ku]);
        const TensorField gv = grad_vec(g, v);
        const ScalarField q = ctx.full_pressure(s, k);
        const VecField gq = grad_scalar(g, q);
        const VecField zlap = flux_laplacian(g, s.X[ku], v);
        TensorField B(nn), jx(nn), A(nn);
        ScalarField q2x(nn);
        for (std::size_t n = 0; n < nn; ++n) {
            jx[n] = ctx.map.jacobian(s.X[ku][n]);
            q2x[n] = ctx.map.q_squared(s.X[ku][n]);
            B[n] = zeta[n] * jx[n];
            A[n] = gv[n] * B[n];
        }
        const VecField divT =
            ctx.newtonian ? VecField(nn) : stress_divergence(g, s.T[ku], B);

        for (int c = 0; c < coarse_pressure_size(g); ++c) {
            const std::size_t fn = static_cast<std::size_t>(coarse_node_fine_id(g, c));
            rep.trace = std::max(rep.trace, std::fabs(trace(gv[fn] * zeta[fn] * jx[fn])));
        }
        for (std::size_t n = 0; n < nn; ++n) {
            const int node = static_cast<int>(n);
            rep.trace_fine =
                std::max(rep.trace_fine, std::fabs(trace(gv[n] * zeta[n] * jx[n])));
            if (!g.is_boundary(node)) {
                const Vec2 dvdt = (v[n] - v_prev[n]) / ctx.dt;
                const Vec2 r = ctx.params.reynolds * dvdt - visc * q2x[n] * zlap[n] +
                               transpose(jx[n]) * (transpose(zeta[n]) * gq[n]) -
                               (ctx.newtonian ? Vec2{} : divT[n]);
                rep.momentum = std::max({rep.momentum, std::fabs(r.x), std::fabs(r.y)});
            } else {
                const Vec2 mx = inverse(jx[n]) * (cof[n] * g.normals[n]);
                const Mat2 D = gv[n] * zeta[n] * jx[n];
                Mat2 S = visc * (D + transpose(D)) - q[n] * Mat2::identity();
                if (!ctx.newtonian) S += s.T[ku][n].full();
                const Vec2 r = S * mx;
                rep.traction = std::max({rep.traction, std::fabs(r.x), std::fabs(r.y)});
            }

            // ODE rows (midpoint consistency).
            const Vec2 xdot = (s.X[ku][n] - s.X[ku - 1][n]) / ctx.dt;
            const Vec2 xm = 0.5 * (s.X[ku][n] + s.X[ku - 1][n]);
            const Vec2 vm = 0.5 * (v[n] + v_prev[n]);
            const Vec2 fr = xdot - ctx.map.jacobian(xm) * vm;
            rep.flux_ode = std::max({rep.flux_ode, std::fabs(fr.x), std::fabs(fr.y)});

            if (!ctx.newtonian) {
                const Mat2 Am = 0.5 * (A[n] + A_prev[n]);
                const Sym2 Tm = 0.5 * (s.T[ku][n] + s.T[ku - 1][n]);
                const Mat2 Tf = Tm.full();
                Sym2 rhs = symmetrize(Am * Tf + Tf * transpose(Am));
                rhs += (-1.0 / we) * Tm;
                rhs += (ctx.params.kappa / we) * symmetrize(Am + transpose(Am));
                const Sym2 tdot = (1.0 / ctx.dt) * (s.T[ku][n] - s.T[ku - 1][n]);
                rep.stress_ode = std::max(rep.stress_ode, max_abs(tdot - rhs));
            }
        }
        v_prev = v;
        if (!ctx.newtonian) A_prev = A;
    }
    return rep;
}

}  // namespace splash2d
