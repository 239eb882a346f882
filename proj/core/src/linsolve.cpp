#include "splash2d/linsolve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

#include "splash2d/errors.hpp"

namespace splash2d {

using SpMat = Eigen::SparseMatrix<double>;
using SpMatRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

// ---------------------------------------------------------------------------
// Coarse pressure space (Bercovier-Pironneau pairing): pressure lives on the
// half-resolution logical grid (even i, even j, plus the pole) and is
// prolonged bilinearly in index space. The velocity/pressure pair is inf-sup
// stable without any stabilization term, so the trace rows are enforced to
// solver precision and the converged Picard iterate satisfies the discrete
// incompressibility exactly.

int coarse_pressure_size(const Grid& g) { return (g.nb / 2) * (g.nr / 2) + 1; }

int coarse_node_fine_id(const Grid& g, int c) {
    const int nbc = g.nb / 2;
    const int nrc = g.nr / 2;
    if (c == nbc * nrc) return g.pole_id();
    const int ci = c % nbc;
    const int cj = c / nbc;
    return g.id(2 * ci, 2 * cj);
}

namespace {

/// Prolongation weights of a fine node over the coarse dofs.
std::vector<std::pair<int, double>> prolong_row(const Grid& g, int fine) {
    const int nbc = g.nb / 2;
    const int nrc = g.nr / 2;
    const int pole_c = nbc * nrc;
    if (fine == g.pole_id()) return {{pole_c, 1.0}};
    const int i = fine % g.nb;
    const int j = fine / g.nb;

    // i-weights over coarse columns.
    std::vector<std::pair<int, double>> iw;
    if (i % 2 == 0)
        iw = {{i / 2, 1.0}};
    else
        iw = {{(i - 1) / 2, 0.5}, {((i + 1) / 2) % nbc, 0.5}};

    // j-weights over coarse rings (the pole acts as the ring at j = nr).
    std::vector<std::pair<int, double>> jw;  // (coarse ring index or -1 for pole)
    if (j % 2 == 0)
        jw = {{j / 2, 1.0}};
    else
        jw = {{(j - 1) / 2, 0.5}, {(j + 1) / 2 < nrc ? (j + 1) / 2 : -1, 0.5}};

    std::vector<std::pair<int, double>> row;
    for (const auto& [cj, wj] : jw) {
        if (cj == -1) {
            row.emplace_back(pole_c, wj);
            continue;
        }
        for (const auto& [ci, wi] : iw) row.emplace_back(cj * nbc + ci, wj * wi);
    }
    return row;
}

SpMat build_prolongation(const Grid& g) {
    const int nf = g.nnodes();
    const int nc = coarse_pressure_size(g);
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(nf) * 4);
    for (int n = 0; n < nf; ++n)
        for (const auto& [c, w] : prolong_row(g, n)) trip.emplace_back(n, c, w);
    SpMat P(nf, nc);
    P.setFromTriplets(trip.begin(), trip.end());
    P.makeCompressed();
    return P;
}

}  // namespace

ScalarField prolong_pressure(const Grid& g, const std::vector<double>& coarse) {
    if (static_cast<int>(coarse.size()) != coarse_pressure_size(g))
        throw ShapeError("prolong_pressure: coarse size mismatch");
    ScalarField out(static_cast<std::size_t>(g.nnodes()), 0.0);
    for (int n = 0; n < g.nnodes(); ++n) {
        double acc = 0.0;
        for (const auto& [c, w] : prolong_row(g, n))
            acc += w * coarse[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(n)] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// PhiLift evaluation

VecField PhiLift::phi(double t) const {
    const double w = a(t);
    VecField out(v0.size());
    for (std::size_t n = 0; n < v0.size(); ++n) out[n] = v0[n] + w * phi1[n];
    return out;
}

VecField PhiLift::dphi_dt(double t) const {
    const double w = da(t);
    VecField out(v0.size());
    for (std::size_t n = 0; n < v0.size(); ++n) out[n] = w * phi1[n];
    return out;
}

TensorField PhiLift::grad_phi(double t) const {
    const double w = a(t);
    TensorField out(grad_v0.size());
    for (std::size_t n = 0; n < grad_v0.size(); ++n) out[n] = grad_v0[n] + w * grad_phi1[n];
    return out;
}

TensorField PhiLift::zeta_phi(double t) const {
    const double w = a(t);
    TensorField out(W.size());
    for (std::size_t n = 0; n < W.size(); ++n) out[n] = Mat2::identity() + w * W[n];
    return out;
}

TensorField PhiLift::jp_phi(const BranchMap& map, const Grid& g, double t) const {
    const double w = a(t);
    TensorField out(jcorr.size());
    for (std::size_t n = 0; n < jcorr.size(); ++n)
        out[n] = map.jacobian(g.nodes[n]) + w * jcorr[n];
    return out;
}

// ---------------------------------------------------------------------------
// Solver implementation

struct LinearSolver::Impl {
    const Grid* grid;
    BranchMap map;
    Params params;
    double dt;
    int nc;
    SpMat A;
    SpMat P;
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> fallback;
    bool use_fallback = false;
};

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

LinearSolver::LinearSolver(const Grid& g, const BranchMap& map, const Params& p, double dt)
    : impl_(std::make_unique<Impl>()) {
    if (dt <= 0.0) throw ParamError("linear solver: dt must be > 0");
    impl_->grid = &g;
    impl_->map = map;
    impl_->params = p;
    impl_->dt = dt;
    impl_->nc = coarse_pressure_size(g);
    impl_->P = build_prolongation(g);

    const int nn = g.nnodes();
    const int nv = 2 * nn;
    const int N = nv + impl_->nc;
    const double visc = 1.0 - p.kappa;

    // Pressure-gradient blocks: fine derivatives of the prolonged pressure.
    SpMat Dx(nn, nn), Dy(nn, nn);
    {
        std::vector<Triplet> tx, ty;
        for (int n = 0; n < nn; ++n) {
            for (const auto& e : g.ddx(n)) tx.emplace_back(n, e.id, e.w);
            for (const auto& e : g.ddy(n)) ty.emplace_back(n, e.id, e.w);
        }
        Dx.setFromTriplets(tx.begin(), tx.end());
        Dy.setFromTriplets(ty.begin(), ty.end());
    }
    SpMatRow GxP = SpMatRow(SpMat(Dx * impl_->P));
    SpMatRow GyP = SpMatRow(SpMat(Dy * impl_->P));
    SpMatRow Prow = SpMatRow(impl_->P);

    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(nn) * 60);

    for (int n = 0; n < nn; ++n) {
        const std::size_t u = static_cast<std::size_t>(n);
        const Mat2 jp = map.jacobian(g.nodes[u]);
        const double q2 = map.q_squared(g.nodes[u]);

        if (!g.is_boundary(n)) {
            // Momentum rows: Re/dt v - (1-kappa) Q^2 lap v + (J^P)^T grad q.
            trip.emplace_back(2 * n, 2 * n, p.reynolds / dt);
            trip.emplace_back(2 * n + 1, 2 * n + 1, p.reynolds / dt);
            for (const auto& e : g.lap(n)) {
                trip.emplace_back(2 * n, 2 * e.id, -visc * q2 * e.w);
                trip.emplace_back(2 * n + 1, 2 * e.id + 1, -visc * q2 * e.w);
            }
            // (J^T grad q)_k = J_{1k} dx q + J_{2k} dy q.
            for (SpMatRow::InnerIterator it(GxP, n); it; ++it) {
                trip.emplace_back(2 * n, nv + static_cast<int>(it.col()),
                                  jp.a11 * it.value());
                trip.emplace_back(2 * n + 1, nv + static_cast<int>(it.col()),
                                  jp.a12 * it.value());
            }
            for (SpMatRow::InnerIterator it(GyP, n); it; ++it) {
                trip.emplace_back(2 * n, nv + static_cast<int>(it.col()),
                                  jp.a21 * it.value());
                trip.emplace_back(2 * n + 1, nv + static_cast<int>(it.col()),
                                  jp.a22 * it.value());
            }
        } else {
            // Traction rows:
            // [-q I + (1-kappa)(grad v J + (grad v J)^T)] (J^P)^{-1} n0 = h.
            const Vec2 n0 = g.normals[u];
            const Vec2 mvec = inverse(jp) * n0;
            const Vec2 jm = jp * mvec;
            for (const auto& e : g.ddx(n)) {
                trip.emplace_back(2 * n, 2 * e.id, visc * e.w * jm.x);
                trip.emplace_back(2 * n + 1, 2 * e.id + 1, visc * e.w * jm.x);
            }
            for (const auto& e : g.ddy(n)) {
                trip.emplace_back(2 * n, 2 * e.id, visc * e.w * jm.y);
                trip.emplace_back(2 * n + 1, 2 * e.id + 1, visc * e.w * jm.y);
            }
            for (int k = 0; k < 2; ++k) {
                const double j1k = k == 0 ? jp.a11 : jp.a12;
                const double j2k = k == 0 ? jp.a21 : jp.a22;
                for (int l = 0; l < 2; ++l) {
                    const double ml = l == 0 ? mvec.x : mvec.y;
                    for (const auto& e : g.ddx(n))
                        trip.emplace_back(2 * n + k, 2 * e.id + l, visc * e.w * j1k * ml);
                    for (const auto& e : g.ddy(n))
                        trip.emplace_back(2 * n + k, 2 * e.id + l, visc * e.w * j2k * ml);
                }
            }
            for (SpMatRow::InnerIterator it(Prow, n); it; ++it) {
                trip.emplace_back(2 * n, nv + static_cast<int>(it.col()),
                                  -mvec.x * it.value());
                trip.emplace_back(2 * n + 1, nv + static_cast<int>(it.col()),
                                  -mvec.y * it.value());
            }
        }
    }

    // Trace rows at the coarse collocation nodes: Tr(grad v J^P) = g.
    for (int c = 0; c < impl_->nc; ++c) {
        const int fn = coarse_node_fine_id(g, c);
        const Mat2 jp = map.jacobian(g.nodes[static_cast<std::size_t>(fn)]);
        for (const auto& e : g.ddx(fn)) {
            trip.emplace_back(nv + c, 2 * e.id, jp.a11 * e.w);
            trip.emplace_back(nv + c, 2 * e.id + 1, jp.a12 * e.w);
        }
        for (const auto& e : g.ddy(fn)) {
            trip.emplace_back(nv + c, 2 * e.id, jp.a21 * e.w);
            trip.emplace_back(nv + c, 2 * e.id + 1, jp.a22 * e.w);
        }
    }

    impl_->A.resize(N, N);
    impl_->A.setFromTriplets(trip.begin(), trip.end());
    impl_->A.makeCompressed();

    impl_->lu.analyzePattern(impl_->A);
    impl_->lu.factorize(impl_->A);
    if (impl_->lu.info() != Eigen::Success) {
        impl_->fallback.preconditioner().setDroptol(1e-6);
        impl_->fallback.setTolerance(1e-12);
        impl_->fallback.compute(impl_->A);
        if (impl_->fallback.info() != Eigen::Success)
            throw SolverError("linear solver: factorization failed and iterative fallback "
                              "did not initialize");
        impl_->use_fallback = true;
    }
}

std::pair<VecField, ScalarField> LinearSolver::step(const LinearRHS& rhs,
                                                    const VecField& v_prev) const {
    const Grid& g = *impl_->grid;
    const int nn = g.nnodes();
    const int nv = 2 * nn;
    Eigen::VectorXd b(nv + impl_->nc);
    for (int n = 0; n < nn; ++n) {
        const std::size_t u = static_cast<std::size_t>(n);
        if (!g.is_boundary(n)) {
            b[2 * n] = rhs.f[u].x + impl_->params.reynolds / impl_->dt * v_prev[u].x;
            b[2 * n + 1] = rhs.f[u].y + impl_->params.reynolds / impl_->dt * v_prev[u].y;
        } else {
            b[2 * n] = rhs.h[u].x;
            b[2 * n + 1] = rhs.h[u].y;
        }
    }
    for (int c = 0; c < impl_->nc; ++c)
        b[nv + c] = rhs.g[static_cast<std::size_t>(coarse_node_fine_id(g, c))];

    Eigen::VectorXd x;
    if (impl_->use_fallback) {
        x = impl_->fallback.solve(b);
        if (impl_->fallback.info() != Eigen::Success)
            throw SolverError("linear solver: iterative fallback failed to converge");
    } else {
        x = impl_->lu.solve(b);
        if (impl_->lu.info() != Eigen::Success)
            throw SolverError("linear solver: back substitution failed");
    }

    // Row-group residuals, relative to the data scale.
    const Eigen::VectorXd r = impl_->A * x - b;
    const double scale = 1.0 + b.lpNorm<Eigen::Infinity>() + x.lpNorm<Eigen::Infinity>();
    SolveResiduals res;
    for (int n = 0; n < nn; ++n) {
        const double r1 = std::fabs(r[2 * n]);
        const double r2 = std::fabs(r[2 * n + 1]);
        if (g.is_boundary(n))
            res.traction = std::max({res.traction, r1, r2});
        else
            res.momentum = std::max({res.momentum, r1, r2});
    }
    for (int c = 0; c < impl_->nc; ++c) res.trace = std::max(res.trace, std::fabs(r[nv + c]));
    res.momentum /= scale;
    res.trace /= scale;
    res.traction /= scale;
    residuals_ = res;
    const double tol = impl_->params.tol_solver;
    if (res.momentum > tol || res.trace > tol || res.traction > tol) {
        // Crude condition estimate: amplification of a unit residual.
        Eigen::VectorXd e = Eigen::VectorXd::Ones(nv + impl_->nc);
        const double cond = impl_->use_fallback
                                ? 0.0
                                : impl_->lu.solve(e).lpNorm<Eigen::Infinity>() *
                                      impl_->A.coeffs().cwiseAbs().maxCoeff();
        throw SolverError("linear solver: residual contract violated", cond);
    }

    VecField v(static_cast<std::size_t>(nn));
    for (int n = 0; n < nn; ++n) v[static_cast<std::size_t>(n)] = {x[2 * n], x[2 * n + 1]};
    std::vector<double> qc(static_cast<std::size_t>(impl_->nc));
    for (int c = 0; c < impl_->nc; ++c) qc[static_cast<std::size_t>(c)] = x[nv + c];
    return {std::move(v), prolong_pressure(g, qc)};
}

std::pair<VecField, ScalarField> solve_linear(const Grid& g, const BranchMap& map,
                                              const LinearRHS& rhs, const Params& p, double dt,
                                              const VecField& v_prev) {
    LinearSolver solver(g, map, p, dt);
    return solver.step(rhs, v_prev);
}

// ---------------------------------------------------------------------------
// Lift construction

namespace {

/// Physical divergence of a label-space vector field at t=0 (labels =
/// conformal coordinates): Tr(grad V J^P).
ScalarField conformal_divergence(const Grid& g, const BranchMap& map, const VecField& V) {
    const TensorField gv = grad_vec(g, V);
    ScalarField out(static_cast<std::size_t>(g.nnodes()));
    for (int n = 0; n < g.nnodes(); ++n) {
        const std::size_t u = static_cast<std::size_t>(n);
        out[u] = trace(gv[u] * map.jacobian(g.nodes[u]));
    }
    return out;
}

/// (div tau)_k = sum_{m,j} (d T_{km} / d a_j) J_{jm} for symmetric tau.
VecField conformal_divergence_sym(const Grid& g, const BranchMap& map, const SymField& T) {
    const SymGrad gt = grad_sym(g, T);
    VecField out(static_cast<std::size_t>(g.nnodes()));
    for (int n = 0; n < g.nnodes(); ++n) {
        const std::size_t u = static_cast<std::size_t>(n);
        const Mat2 jp = map.jacobian(g.nodes[u]);
        out[u].x = gt.g11[u].x * jp.a11 + gt.g11[u].y * jp.a21 + gt.g12[u].x * jp.a12 +
                   gt.g12[u].y * jp.a22;
        out[u].y = gt.g12[u].x * jp.a11 + gt.g12[u].y * jp.a21 + gt.g22[u].x * jp.a12 +
                   gt.g22[u].y * jp.a22;
    }
    return out;
}

}  // namespace

PhiLift build_phi(const Grid& g, const BranchMap& map, const VecField& v0, const SymField& T0,
                  const Params& p, const std::optional<VecField>& analytic_g0) {
    const int nn = g.nnodes();
    PhiLift lift;
    lift.reynolds = p.reynolds;
    lift.v0 = v0;
    lift.grad_v0 = grad_vec(g, v0);

    const double visc = 1.0 - p.kappa;

    // G0 = (1-kappa) Q^2 lap(v0) + div tau0 (physical forces at t = 0).
    VecField G0;
    if (analytic_g0) {
        G0 = *analytic_g0;
    } else {
        const VecField lap_v0 = laplacian_vec(g, v0);
        const VecField div_T0 = conformal_divergence_sym(g, map, T0);
        G0.resize(static_cast<std::size_t>(nn));
        for (int n = 0; n < nn; ++n) {
            const std::size_t u = static_cast<std::size_t>(n);
            G0[u] = visc * map.q_squared(g.nodes[u]) * lap_v0[u] + div_T0[u];
        }
    }

    // Elliptic solve for q_phi: Q^2 lap q = div_z G0 in the interior,
    // Dirichlet data from the t=0 normal traction balance on the boundary.
    const ScalarField rhs_div = conformal_divergence(g, map, G0);
    std::vector<Triplet> trip;
    Eigen::VectorXd b(nn);
    for (int n = 0; n < nn; ++n) {
        const std::size_t u = static_cast<std::size_t>(n);
        if (g.is_boundary(n)) {
            trip.emplace_back(n, n, 1.0);
            const Mat2 jp = map.jacobian(g.nodes[u]);
            const Vec2 mvec = inverse(jp) * g.normals[u];
            const Mat2 D = lift.grad_v0[u] * jp;
            const Mat2 S = visc * (D + transpose(D)) + T0[u].full();
            b[n] = dot(mvec, S * mvec) / norm2(mvec);
        } else {
            const double q2 = map.q_squared(g.nodes[u]);
            for (const auto& e : g.lap(n)) trip.emplace_back(n, e.id, q2 * e.w);
            b[n] = rhs_div[u];
        }
    }
    SpMat Aq(nn, nn);
    Aq.setFromTriplets(trip.begin(), trip.end());
    Aq.makeCompressed();
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(Aq);
    lu.factorize(Aq);
    if (lu.info() != Eigen::Success)
        throw SolverError("build_phi: elliptic factorization failed");
    const Eigen::VectorXd qv = lu.solve(b);
    if (lu.info() != Eigen::Success) throw SolverError("build_phi: elliptic solve failed");

    lift.q_phi.resize(static_cast<std::size_t>(nn));
    for (int n = 0; n < nn; ++n) lift.q_phi[static_cast<std::size_t>(n)] = qv[n];
    lift.grad_q_phi = grad_scalar(g, lift.q_phi);

    // phi1 = (G0 - (J^P)^T grad q_phi) / Re; the lift is constant for Re = 0.
    lift.phi1.assign(static_cast<std::size_t>(nn), Vec2{});
    if (p.reynolds > 0.0) {
        for (int n = 0; n < nn; ++n) {
            const std::size_t u = static_cast<std::size_t>(n);
            const Mat2 jp = map.jacobian(g.nodes[u]);
            lift.phi1[u] = (1.0 / p.reynolds) * (G0[u] - transpose(jp) * lift.grad_q_phi[u]);
        }
    }
    lift.grad_phi1 = grad_vec(g, lift.phi1);

    // zeta_phi correction W = -grad(J^P v0) and the J^P_phi correction.
    VecField jv(static_cast<std::size_t>(nn));
    for (int n = 0; n < nn; ++n) {
        const std::size_t u = static_cast<std::size_t>(n);
        jv[u] = map.jacobian(g.nodes[u]) * v0[u];
    }
    const TensorField gjv = grad_vec(g, jv);
    lift.W.resize(static_cast<std::size_t>(nn));
    lift.jcorr.resize(static_cast<std::size_t>(nn));
    for (int n = 0; n < nn; ++n) {
        const std::size_t u = static_cast<std::size_t>(n);
        lift.W[u] = -1.0 * gjv[u];
        const Mat2 d1 = map.jacobian_derivative(g.nodes[u], 0);
        const Mat2 d2 = map.jacobian_derivative(g.nodes[u], 1);
        lift.jcorr[u] = jv[u].x * d1 + jv[u].y * d2;
    }
    return lift;
}

LiftCompatReport check_lift_compatibility(const Grid& g, const BranchMap& map,
                                          const LinearRHS& rhs, const Params& p) {
    LiftCompatReport rep;
    const TensorField gv = grad_vec(g, rhs.v0);
    for (int n = 0; n < g.nnodes(); ++n) {
        const std::size_t u = static_cast<std::size_t>(n);
        const Mat2 jp = map.jacobian(g.nodes[u]);
        rep.trace_residual =
            std::max(rep.trace_residual, std::fabs(trace(gv[u] * jp) - rhs.g[u]));
    }
    const double visc = 1.0 - p.kappa;
    for (int i = 0; i < g.nb; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        const Mat2 jp = map.jacobian(g.nodes[u]);
        const Vec2 mvec = inverse(jp) * g.normals[u];
        const Mat2 DJ = gv[u] * jp;
        const Vec2 lhs = visc * ((DJ + transpose(DJ)) * mvec);
        const Vec2 mhat = mvec / norm(mvec);
        const double res = dot(perp(mhat), lhs - rhs.h[u]);
        rep.traction_tangential_residual =
            std::max(rep.traction_tangential_residual, std::fabs(res));
    }
    rep.pass = rep.trace_residual < p.tol_div &&
               rep.traction_tangential_residual < p.tol_div;
    return rep;
}

}  // namespace splash2d
