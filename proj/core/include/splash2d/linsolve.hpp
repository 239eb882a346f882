#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "splash2d/conformal.hpp"
#include "splash2d/fields.hpp"
#include "splash2d/params.hpp"

namespace splash2d {

/// Data of one implicit time step of the linearized system: momentum forcing,
/// trace-constraint data, boundary traction data.
struct LinearRHS {
    VecField f;                // interior momentum data
    ScalarField g;             // trace data at every node (sampled at the
                               // coarse collocation nodes by the solver)
    std::vector<Vec2> h;       // traction data at the nb boundary nodes
    VecField v0;               // initial velocity (compatibility checks)
};

/// Time-dependent lift phi with phi(0) = v0 and the discrete initial time
/// derivative of the lifted unknown vanishing. The correction is carried by
/// the scalar weight a(t) = t exp(-t^2).
struct PhiLift {
    VecField v0;
    TensorField grad_v0;
    VecField phi1;          // velocity correction (zero when Re == 0)
    TensorField grad_phi1;
    ScalarField q_phi;
    VecField grad_q_phi;
    TensorField W;          // -grad(J^P v0)
    TensorField jcorr;      // d_k J^P_{ij} (J^P v0)_k contraction
    double reynolds = 1.0;

    static double a(double t) { return t * std::exp(-t * t); }
    static double da(double t) { return (1.0 - 2.0 * t * t) * std::exp(-t * t); }

    VecField phi(double t) const;
    VecField dphi_dt(double t) const;
    TensorField grad_phi(double t) const;
    TensorField zeta_phi(double t) const;
    TensorField jp_phi(const BranchMap& map, const Grid& g, double t) const;
};

struct LiftCompatReport {
    double trace_residual = 0.0;
    double traction_tangential_residual = 0.0;
    bool pass = false;
};

/// Residual row magnitudes of an accepted solve, relative to the data scale.
struct SolveResiduals {
    double momentum = 0.0;
    double trace = 0.0;
    double traction = 0.0;
};

/// Pressure space of the solver: the half-resolution logical grid (even i,
/// even j, plus the pole), prolonged bilinearly in index space. The pairing
/// is inf-sup stable without stabilization, so every trace row holds at
/// solver precision.
int coarse_pressure_size(const Grid& g);
int coarse_node_fine_id(const Grid& g, int c);
ScalarField prolong_pressure(const Grid& g, const std::vector<double>& coarse);

/// Assembled implicit-Euler discretization of the operator L on a fixed grid.
/// The matrix depends only on (grid, map, params, dt) and is factorized once;
/// every step reuses the factorization. The returned pressure is the
/// prolonged fine-grid field (in the range of the coarse space).
class LinearSolver {
   public:
    LinearSolver(const Grid& g, const BranchMap& map, const Params& p, double dt);
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    /// One implicit Euler step; residuals of all three equation rows are
    /// checked against tol_solver (relative to the data scale) and a
    /// SolverError is thrown when violated.
    std::pair<VecField, ScalarField> step(const LinearRHS& rhs, const VecField& v_prev) const;

    const SolveResiduals& last_residuals() const { return residuals_; }

   private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    mutable SolveResiduals residuals_;
};

/// One-shot convenience wrapper around LinearSolver.
std::pair<VecField, ScalarField> solve_linear(const Grid& g, const BranchMap& map,
                                              const LinearRHS& rhs, const Params& p, double dt,
                                              const VecField& v_prev);

/// Lift construction: q_phi from a scalar elliptic solve with Dirichlet data
/// taken from the t=0 normal traction balance, so that the assembled data
/// vanishes at t=0. When the caller knows the analytic initial force
/// G0 = (1-kappa) lap u0 + div tau0 (zero for all the shipped data families),
/// passing it avoids the Q^2-amplified discretization of the same quantity
/// near the branch point.
PhiLift build_phi(const Grid& g, const BranchMap& map, const VecField& v0, const SymField& T0,
                  const Params& p, const std::optional<VecField>& analytic_g0 = std::nullopt);

/// Discrete residuals of the t=0 compatibility conditions for the data.
LiftCompatReport check_lift_compatibility(const Grid& g, const BranchMap& map,
                                          const LinearRHS& rhs, const Params& p);

}  // namespace splash2d
