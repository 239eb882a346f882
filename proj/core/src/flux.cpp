#include "splash2d/flux.hpp"

#include <cmath>

#include "splash2d/errors.hpp"

namespace splash2d {

VecField advance_flux(const BranchMap& map, const VecField& X, const VecField& v, double dt) {
    VecField out(X.size());
    for (std::size_t n = 0; n < X.size(); ++n) {
        const Vec2 vel = v[n];
        auto rhs = [&](const Vec2& pos) { return map.jacobian(pos) * vel; };
        const Vec2 x0 = X[n];
        const Vec2 k1 = rhs(x0);
        const Vec2 k2 = rhs(x0 + (0.5 * dt) * k1);
        const Vec2 k3 = rhs(x0 + (0.5 * dt) * k2);
        const Vec2 k4 = rhs(x0 + dt * k3);
        out[n] = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return out;
}

TensorField compute_zeta(const Grid& g, const VecField& X, double fold_tol) {
    const TensorField gx = grad_vec(g, X);
    TensorField zeta(gx.size());
    for (std::size_t n = 0; n < gx.size(); ++n) {
        const double d = det(gx[n]);
        if (d <= fold_tol)
            throw MeshFoldError("flux: det(grad X) = " + std::to_string(d) + " at node " +
                                std::to_string(n) + " (Lagrangian description lost)");
        zeta[n] = adjugate(gx[n]) * (1.0 / d);
    }
    return zeta;
}

TensorField cofactor_gradient(const Grid& g, const VecField& X) {
    const TensorField gx = grad_vec(g, X);
    TensorField out(gx.size());
    for (std::size_t n = 0; n < gx.size(); ++n) out[n] = cofactor(gx[n]);
    return out;
}

}  // namespace splash2d
