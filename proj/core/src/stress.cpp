#include "splash2d/stress.hpp"

#include <cmath>

#include "splash2d/errors.hpp"

namespace splash2d {

TensorField physical_velocity_gradient(const Grid& g, const BranchMap& map, const VecField& v,
                                       const VecField& X, const TensorField& zeta) {
    const TensorField gv = grad_vec(g, v);
    TensorField A(gv.size());
    for (std::size_t n = 0; n < gv.size(); ++n)
        A[n] = gv[n] * zeta[n] * map.jacobian(X[n]);
    return A;
}

namespace {

inline Sym2 ucm_rhs(const Sym2& T, const Mat2& A, double inv_we, double kappa) {
    const Mat2 Tf = T.full();
    const Mat2 transport = A * Tf + Tf * transpose(A);
    Sym2 out = symmetrize(transport);
    out += (-inv_we) * T;
    out += (kappa * inv_we) * symmetrize(A + transpose(A));
    return out;
}

}  // namespace

SymField advance_stress_frozen(const SymField& T_prev, const TensorField& A, double we,
                               double kappa, double dt) {
    if (we <= 0.0) throw ParamError("stress: weissenberg must be > 0");
    const double inv_we = 1.0 / we;
    SymField out(T_prev.size());
    for (std::size_t n = 0; n < T_prev.size(); ++n) {
        const Sym2 k1 = ucm_rhs(T_prev[n], A[n], inv_we, kappa);
        const Sym2 mid = T_prev[n] + (0.5 * dt) * k1;
        const Sym2 k2 = ucm_rhs(mid, A[n], inv_we, kappa);
        out[n] = T_prev[n] + dt * k2;
    }
    return out;
}

SymField advance_stress(const Grid& g, const BranchMap& map, const SymField& T_prev,
                        const VecField& v, const VecField& X, const TensorField& zeta,
                        const Params& p, double dt) {
    const TensorField A = physical_velocity_gradient(g, map, v, X, zeta);
    return advance_stress_frozen(T_prev, A, p.weissenberg, p.kappa, dt);
}

SymField infinite_we_mode(const SymField& T_prev, const TensorField& A, double dt) {
    SymField out(T_prev.size());
    for (std::size_t n = 0; n < T_prev.size(); ++n) {
        auto rhs = [&](const Sym2& T) {
            const Mat2 Tf = T.full();
            return symmetrize(A[n] * Tf + Tf * transpose(A[n]));
        };
        const Sym2 k1 = rhs(T_prev[n]);
        const Sym2 k2 = rhs(T_prev[n] + (0.5 * dt) * k1);
        out[n] = T_prev[n] + dt * k2;
    }
    return out;
}

Sym2 ucm_shear_oracle(double gammadot, double t, const Params& p) {
    const double we = p.weissenberg;
    const double k = p.kappa;
    const double e = std::exp(-t / we);
    Sym2 out;
    out.t12 = k * gammadot * (1.0 - e);
    out.t11 = 2.0 * k * gammadot * gammadot * (we * (1.0 - e) - t * e);
    out.t22 = 0.0;
    return out;
}

}  // namespace splash2d
