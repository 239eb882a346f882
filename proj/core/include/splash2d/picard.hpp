#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "splash2d/conformal.hpp"
#include "splash2d/fields.hpp"
#include "splash2d/linsolve.hpp"
#include "splash2d/params.hpp"

namespace splash2d {

/// One Picard iterate: full time histories of the lifted velocity w, lifted
/// pressure q_w, elastic stress and flux at the uniform levels t_k = k dt.
struct IterationState {
    std::vector<VecField> w;
    std::vector<ScalarField> qw;
    std::vector<SymField> T;
    std::vector<VecField> X;

    /// Composite norms of the difference against the previous iterate.
    struct NormLedger {
        double velocity = 0.0;  // L2-in-time H1-in-space of dw
        double pressure = 0.0;  // L2-in-time L2-in-space of dq
        double flux = 0.0;      // max-in-time H1 of dX
        double stress = 0.0;    // max-in-time L2 of dT
        double composite() const { return velocity + pressure + flux + stress; }
    } ledger;

    int levels() const { return static_cast<int>(w.size()); }
};

struct ContractionReport {
    std::vector<double> diffs;   // composite difference per sweep
    std::vector<double> ratios;  // diffs[k+1] / diffs[k]
    double final_ratio = std::numeric_limits<double>::quiet_NaN();
    bool contracting = false;
    bool converged = false;
    int sweeps = 0;
    // Fit of r ~ C (1 + 1/We) T^delta, filled by multi-horizon experiments.
    double fit_constant = std::numeric_limits<double>::quiet_NaN();
    double fit_exponent = std::numeric_limits<double>::quiet_NaN();
};

struct NoContraction : Error {
    ContractionReport report;
    explicit NoContraction(ContractionReport r)
        : Error("picard: no contraction within max_sweeps (T too large for this data)"),
          report(std::move(r)) {}
};

/// Equation residuals of a converged iterate, evaluated with the nonlinear
/// discrete operators.
struct ResidualReport {
    double momentum = 0.0;
    double trace = 0.0;       // max |Tr(grad v zeta J^P(X))| over the coarse
                              // collocation nodes (the discrete constraint set)
    double trace_fine = 0.0;  // same residual over all fine nodes (carries the
                              // O(h^2) interpolation floor of the pairing)
    double traction = 0.0;
    double stress_ode = 0.0;
    double flux_ode = 0.0;
};

/// Everything fixed across sweeps: grid, map, params, lift, time grid, the
/// factored linear operator, and the initial data.
struct PicardContext {
    const Grid* grid = nullptr;
    BranchMap map;
    Params params;
    PhiLift lift;
    std::shared_ptr<LinearSolver> solver;
    VecField x_init;   // flux initial condition (labels, possibly shifted)
    SymField T_init;
    double dt = 0.0;
    int levels = 0;    // number of stored time levels (K + 1)
    bool newtonian = false;  // stress coupling disabled

    double time(int k) const { return dt * k; }
    double horizon() const { return dt * (levels - 1); }
    VecField full_velocity(const IterationState& s, int k) const;
    ScalarField full_pressure(const IterationState& s, int k) const;
};

PicardContext make_picard_context(const Grid& g, const BranchMap& map, const Params& p,
                                  const VecField& v0, const SymField& T0, const VecField& x0,
                                  double t_horizon, bool newtonian = false,
                                  const std::optional<VecField>& analytic_g0 = std::nullopt);

/// T_max = (c_cal We/(1+We))^(1/mu_cal).
double max_horizon(const Params& p);

/// Assembled data pieces, separately retrievable for diagnostics.
struct FPieces {
    VecField w, phi, q, T, phiL;
    VecField total() const;
};
struct GPieces {
    ScalarField gbar, phiL;
    ScalarField total() const;
};
struct HPieces {
    std::vector<Vec2> w, wT, phi, phiT, q, T, phiL;
    std::vector<Vec2> total() const;
};

FPieces assemble_f(const PicardContext& ctx, const IterationState& prev, int level);
GPieces assemble_g(const PicardContext& ctx, const IterationState& prev, int level);
HPieces assemble_h(const PicardContext& ctx, const IterationState& prev, int level);

IterationState seed_state(const PicardContext& ctx);
IterationState picard_sweep(const PicardContext& ctx, const IterationState& prev);

struct ConvergeResult {
    IterationState state;
    ContractionReport report;
    ResidualReport residuals;
};

/// Sweeps until the composite difference drops below tol_picard; throws
/// NoContraction (with the report attached) when max_sweeps is exhausted.
ConvergeResult run_to_convergence(const PicardContext& ctx);

ResidualReport equation_residuals(const PicardContext& ctx, const IterationState& s);

}  // namespace splash2d
