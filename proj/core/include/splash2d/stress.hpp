#pragma once

#include "splash2d/conformal.hpp"
#include "splash2d/fields.hpp"
#include "splash2d/params.hpp"

namespace splash2d {

/// Physical velocity gradient A = (grad v) zeta J^P(X) at every node: the
/// coefficient of the upper-convected terms in Lagrangian form.
TensorField physical_velocity_gradient(const Grid& g, const BranchMap& map, const VecField& v,
                                       const VecField& X, const TensorField& zeta);

/// One RK2 (midpoint) step of dT/dt = A T + T A^T - T/We + (kappa/We)(A + A^T)
/// with A frozen over the step. Output symmetrized exactly.
SymField advance_stress_frozen(const SymField& T_prev, const TensorField& A, double we,
                               double kappa, double dt);

/// advance_stress with A built from (v, X, zeta) on the grid.
SymField advance_stress(const Grid& g, const BranchMap& map, const SymField& T_prev,
                        const VecField& v, const VecField& X, const TensorField& zeta,
                        const Params& p, double dt);

/// Infinite-Weissenberg update: only the two upper-convected transport terms.
SymField infinite_we_mode(const SymField& T_prev, const TensorField& A, double dt);

/// Closed-form nondimensional UCM solution for homogeneous simple shear
/// grad u = [[0, gammadot], [0, 0]] with zero initial stress.
Sym2 ucm_shear_oracle(double gammadot, double t, const Params& p);

}  // namespace splash2d
