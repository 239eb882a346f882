#include "splash2d/compat.hpp"

#include <cmath>

namespace splash2d {

CompatReport check_compatibility(const Grid& g, const BranchMap& map, const VecField& v0,
                                 const SymField& T0, const Params& p,
                                 const std::optional<TensorField>& F0) {
    CompatReport rep;

    // div u0 in physical coordinates: Tr(grad v0 . J^P) at the labels.
    const TensorField gv = grad_vec(g, v0);
    for (int n = 0; n < g.nnodes(); ++n) {
        const Mat2 jp = map.jacobian(g.nodes[static_cast<std::size_t>(n)]);
        rep.div_u = std::max(rep.div_u, std::fabs(trace(gv[static_cast<std::size_t>(n)] * jp)));
    }

    if (F0) {
        const TensorField& F = *F0;
        // Row-wise physical divergence of the tensor and det F - 1.
        ScalarField f11(F.size()), f12(F.size()), f21(F.size()), f22(F.size());
        for (std::size_t n = 0; n < F.size(); ++n) {
            f11[n] = F[n].a11;
            f12[n] = F[n].a12;
            f21[n] = F[n].a21;
            f22[n] = F[n].a22;
        }
        const VecField g11 = grad_scalar(g, f11), g12 = grad_scalar(g, f12);
        const VecField g21 = grad_scalar(g, f21), g22 = grad_scalar(g, f22);
        for (int n = 0; n < g.nnodes(); ++n) {
            const std::size_t u = static_cast<std::size_t>(n);
            const Mat2 jp = map.jacobian(g.nodes[u]);
            // (div F)_k = sum_{m,j} (d F_{km} / d a_j) J_{jm}
            const double d1 = g11[u].x * jp.a11 + g11[u].y * jp.a21 + g12[u].x * jp.a12 +
                              g12[u].y * jp.a22;
            const double d2 = g21[u].x * jp.a11 + g21[u].y * jp.a21 + g22[u].x * jp.a12 +
                              g22[u].y * jp.a22;
            rep.div_f = std::max({rep.div_f, std::fabs(d1), std::fabs(d2)});
            rep.det_f = std::max(rep.det_f, std::fabs(det(F[u]) - 1.0));
        }
    }

    // Tangential traction balance on the physical boundary.
    for (int i = 0; i < g.nb; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        const Vec2 zp = map.inverse(g.nodes[u + 0]);
        const Vec2 zn = map.inverse(g.nodes[static_cast<std::size_t>((i + 1) % g.nb)]);
        const Vec2 zb = map.inverse(g.nodes[static_cast<std::size_t>((i - 1 + g.nb) % g.nb)]);
        const Vec2 t = (zn - zb) / norm(zn - zb);
        const Vec2 n{t.y, -t.x};
        (void)zp;
        const Mat2 jp = map.jacobian(g.nodes[u]);
        const Mat2 D = gv[u] * jp;  // physical velocity gradient at t = 0
        const Mat2 S = (1.0 - p.kappa) * (D + transpose(D)) + T0[u].full();
        const Vec2 sn = S * n;
        rep.traction_tangential = std::max(rep.traction_tangential, std::fabs(dot(perp(n), sn)));
    }

    rep.pass = rep.div_u < p.tol_div && rep.div_f < p.tol_div && rep.det_f < p.tol_div &&
               rep.traction_tangential < p.tol_div;
    return rep;
}

}  // namespace splash2d
