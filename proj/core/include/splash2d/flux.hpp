#pragma once

#include "splash2d/conformal.hpp"
#include "splash2d/fields.hpp"

namespace splash2d {

/// Lagrangian flux state: the flux map X, its inverse gradient zeta and the
/// cofactor gradient (the transforms of normals under the flow).
struct FluxState {
    VecField X;
    TensorField zeta;
    TensorField grad_lambda;
};

/// One RK4 step of the node-wise ODE dX/dt = J^P(X) v with v held fixed over
/// the step. Throws SingularJacobian if any stage touches the branch point.
VecField advance_flux(const BranchMap& map, const VecField& X, const VecField& v, double dt);

/// zeta = (grad X)^{-1} node-wise; MeshFoldError when det(grad X) <= fold_tol.
TensorField compute_zeta(const Grid& g, const VecField& X, double fold_tol = 1e-6);

/// Node-wise -Lambda (grad X) Lambda (the cofactor matrix of grad X).
TensorField cofactor_gradient(const Grid& g, const VecField& X);

}  // namespace splash2d
