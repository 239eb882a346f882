#include "splash2d/fields.hpp"

#include <algorithm>
#include <cmath>

namespace splash2d {

ScalarField zero_scalar(const Grid& g) { return ScalarField(static_cast<std::size_t>(g.nnodes()), 0.0); }
VecField zero_vec(const Grid& g) { return VecField(static_cast<std::size_t>(g.nnodes())); }
SymField zero_sym(const Grid& g) { return SymField(static_cast<std::size_t>(g.nnodes())); }

VecField identity_flux(const Grid& g) { return g.nodes; }

double apply_stencil(const Grid::Stencil& s, const ScalarField& f) {
    double acc = 0.0;
    for (const auto& e : s) acc += e.w * f[static_cast<std::size_t>(e.id)];
    return acc;
}

VecField grad_scalar(const Grid& g, const ScalarField& f) {
    VecField out(static_cast<std::size_t>(g.nnodes()));
    for (int n = 0; n < g.nnodes(); ++n) {
        double gx = 0.0, gy = 0.0;
        for (const auto& e : g.ddx(n)) gx += e.w * f[static_cast<std::size_t>(e.id)];
        for (const auto& e : g.ddy(n)) gy += e.w * f[static_cast<std::size_t>(e.id)];
        out[static_cast<std::size_t>(n)] = {gx, gy};
    }
    return out;
}

TensorField grad_vec(const Grid& g, const VecField& v) {
    TensorField out(static_cast<std::size_t>(g.nnodes()));
    for (int n = 0; n < g.nnodes(); ++n) {
        Mat2 m;
        for (const auto& e : g.ddx(n)) {
            const Vec2& val = v[static_cast<std::size_t>(e.id)];
            m.a11 += e.w * val.x;
            m.a21 += e.w * val.y;
        }
        for (const auto& e : g.ddy(n)) {
            const Vec2& val = v[static_cast<std::size_t>(e.id)];
            m.a12 += e.w * val.x;
            m.a22 += e.w * val.y;
        }
        out[static_cast<std::size_t>(n)] = m;
    }
    return out;
}

SymGrad grad_sym(const Grid& g, const SymField& t) {
    SymGrad out{VecField(static_cast<std::size_t>(g.nnodes())),
                VecField(static_cast<std::size_t>(g.nnodes())),
                VecField(static_cast<std::size_t>(g.nnodes()))};
    for (int n = 0; n < g.nnodes(); ++n) {
        Vec2 g11, g12, g22;
        for (const auto& e : g.ddx(n)) {
            const Sym2& s = t[static_cast<std::size_t>(e.id)];
            g11.x += e.w * s.t11;
            g12.x += e.w * s.t12;
            g22.x += e.w * s.t22;
        }
        for (const auto& e : g.ddy(n)) {
            const Sym2& s = t[static_cast<std::size_t>(e.id)];
            g11.y += e.w * s.t11;
            g12.y += e.w * s.t12;
            g22.y += e.w * s.t22;
        }
        out.g11[static_cast<std::size_t>(n)] = g11;
        out.g12[static_cast<std::size_t>(n)] = g12;
        out.g22[static_cast<std::size_t>(n)] = g22;
    }
    return out;
}

ScalarField laplacian_scalar(const Grid& g, const ScalarField& f) {
    ScalarField out(static_cast<std::size_t>(g.nnodes()), 0.0);
    for (int n = 0; n < g.nnodes(); ++n) out[static_cast<std::size_t>(n)] = apply_stencil(g.lap(n), f);
    return out;
}

VecField laplacian_vec(const Grid& g, const VecField& v) {
    VecField out(static_cast<std::size_t>(g.nnodes()));
    for (int n = 0; n < g.nnodes(); ++n) {
        Vec2 acc;
        for (const auto& e : g.lap(n)) acc += e.w * v[static_cast<std::size_t>(e.id)];
        out[static_cast<std::size_t>(n)] = acc;
    }
    return out;
}

namespace {

void solve_small(std::vector<double>& N, std::vector<double>& rhs, int n) {
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int r = k + 1; r < n; ++r)
            if (std::fabs(N[static_cast<std::size_t>(r * n + k)]) >
                std::fabs(N[static_cast<std::size_t>(piv * n + k)]))
                piv = r;
        if (piv != k) {
            for (int c = 0; c < n; ++c)
                std::swap(N[static_cast<std::size_t>(k * n + c)],
                          N[static_cast<std::size_t>(piv * n + c)]);
            std::swap(rhs[static_cast<std::size_t>(k)], rhs[static_cast<std::size_t>(piv)]);
        }
        const double d = N[static_cast<std::size_t>(k * n + k)];
        for (int r = k + 1; r < n; ++r) {
            const double m = N[static_cast<std::size_t>(r * n + k)] / d;
            for (int c = k; c < n; ++c)
                N[static_cast<std::size_t>(r * n + c)] -= m * N[static_cast<std::size_t>(k * n + c)];
            rhs[static_cast<std::size_t>(r)] -= m * rhs[static_cast<std::size_t>(k)];
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        double s = rhs[static_cast<std::size_t>(k)];
        for (int c = k + 1; c < n; ++c)
            s -= N[static_cast<std::size_t>(k * n + c)] * rhs[static_cast<std::size_t>(c)];
        rhs[static_cast<std::size_t>(k)] = s / N[static_cast<std::size_t>(k * n + k)];
    }
}

}  // namespace

VecField flux_laplacian(const Grid& g, const VecField& X, const VecField& u) {
    const std::size_t nn = u.size();
    VecField out(nn);

    auto stencil_values = [&](const std::vector<std::pair<int, double>>& st,
                              const VecField& f) {
        Vec2 acc;
        for (const auto& [nid, w] : st) acc += w * f[static_cast<std::size_t>(nid)];
        return acc;
    };

    for (int j = 0; j < g.nr; ++j) {
        for (int i = 0; i < g.nb; ++i) {
            const int node = g.id(i, j);
            const std::size_t un = static_cast<std::size_t>(node);

            std::vector<std::pair<int, double>> xi_st = {{g.id(i + 1, j), 0.5},
                                                         {g.id(i - 1, j), -0.5}};
            std::vector<std::pair<int, double>> xi2_st = {
                {g.id(i + 1, j), 1.0}, {node, -2.0}, {g.id(i - 1, j), 1.0}};
            std::vector<std::pair<int, double>> eta_st, eta2_st;
            if (j == 0) {
                eta_st = {{g.id(i, 0), -1.5}, {g.id(i, 1), 2.0}, {g.id(i, 2), -0.5}};
                eta2_st = {{g.id(i, 0), 2.0}, {g.id(i, 1), -5.0}, {g.id(i, 2), 4.0},
                           {g.id(i, 3), -1.0}};
            } else {
                eta_st = {{g.id(i, j + 1), 0.5}, {g.id(i, j - 1), -0.5}};
                eta2_st = {{g.id(i, j + 1), 1.0}, {node, -2.0}, {g.id(i, j - 1), 1.0}};
            }
            // Cross stencil: xi-central difference of the eta stencil (the
            // pole contributes equally left and right, so it drops out).
            std::vector<std::pair<int, double>> cross_st;
            for (const auto& [nid, w] : eta_st) {
                if (nid >= g.nb * g.nr) continue;
                const int jj = nid / g.nb;
                const int ii = nid % g.nb;
                cross_st.emplace_back(g.id(ii + 1, jj), 0.5 * w);
                cross_st.emplace_back(g.id(ii - 1, jj), -0.5 * w);
            }

            const Vec2 x_xi = stencil_values(xi_st, X);
            const Vec2 x_eta = stencil_values(eta_st, X);
            const Mat2 jm{x_xi.x, x_eta.x, x_xi.y, x_eta.y};
            const Mat2 inv = inverse(jm);
            const Vec2 grad_xi{inv.a11, inv.a12};
            const Vec2 grad_eta{inv.a21, inv.a22};
            const double A = norm2(grad_xi);
            const double B = dot(grad_xi, grad_eta);
            const double C = norm2(grad_eta);
            const Vec2 S = A * stencil_values(xi2_st, X) + 2.0 * B * stencil_values(cross_st, X) +
                           C * stencil_values(eta2_st, X);
            const double D = -dot(S, grad_xi);
            const double E = -dot(S, grad_eta);

            out[un] = A * stencil_values(xi2_st, u) + 2.0 * B * stencil_values(cross_st, u) +
                      C * stencil_values(eta2_st, u) + D * stencil_values(xi_st, u) +
                      E * stencil_values(eta_st, u);
        }
    }

    // Pole: least-squares quadratic fit in the flux-mapped coordinates.
    const int pid = g.pole_id();
    std::vector<int> ring_ids;
    for (int j = g.nr - 1; j >= g.nr - 2; --j)
        for (int i = 0; i < g.nb; ++i) ring_ids.push_back(g.id(i, j));
    double hscale = 0.0;
    for (int nid : ring_ids)
        hscale += norm(X[static_cast<std::size_t>(nid)] - X[static_cast<std::size_t>(pid)]);
    hscale /= static_cast<double>(ring_ids.size());

    const int m = static_cast<int>(ring_ids.size());
    std::vector<double> M(static_cast<std::size_t>(m) * 5);
    for (int k = 0; k < m; ++k) {
        const Vec2 d = (X[static_cast<std::size_t>(ring_ids[static_cast<std::size_t>(k)])] -
                        X[static_cast<std::size_t>(pid)]) / hscale;
        M[static_cast<std::size_t>(k * 5 + 0)] = d.x;
        M[static_cast<std::size_t>(k * 5 + 1)] = d.y;
        M[static_cast<std::size_t>(k * 5 + 2)] = 0.5 * d.x * d.x;
        M[static_cast<std::size_t>(k * 5 + 3)] = d.x * d.y;
        M[static_cast<std::size_t>(k * 5 + 4)] = 0.5 * d.y * d.y;
    }
    std::vector<double> N(25, 0.0);
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
            double acc = 0.0;
            for (int k = 0; k < m; ++k)
                acc += M[static_cast<std::size_t>(k * 5 + a)] *
                       M[static_cast<std::size_t>(k * 5 + b)];
            N[static_cast<std::size_t>(a * 5 + b)] = acc;
        }
    Vec2 lap_pole;
    for (int comp = 0; comp < 2; ++comp) {
        std::vector<double> rhs(5, 0.0);
        for (int a = 0; a < 5; ++a) {
            double acc = 0.0;
            for (int k = 0; k < m; ++k) {
                const std::size_t rk =
                    static_cast<std::size_t>(ring_ids[static_cast<std::size_t>(k)]);
                const double df = (comp == 0 ? u[rk].x - u[static_cast<std::size_t>(pid)].x
                                             : u[rk].y - u[static_cast<std::size_t>(pid)].y);
                acc += M[static_cast<std::size_t>(k * 5 + a)] * df;
            }
            rhs[static_cast<std::size_t>(a)] = acc;
        }
        std::vector<double> Ncopy = N;
        solve_small(Ncopy, rhs, 5);
        const double lap = (rhs[2] + rhs[4]) / (hscale * hscale);
        if (comp == 0)
            lap_pole.x = lap;
        else
            lap_pole.y = lap;
    }
    out[static_cast<std::size_t>(pid)] = lap_pole;
    return out;
}

namespace {

template <typename Field, typename Value>
Value interp_impl(const Grid& g, const Field& f, const Vec2& p) {
    const Grid::CellCoord c = g.locate(p);
    const Value f00 = f[static_cast<std::size_t>(g.id(c.i, c.j))];
    const Value f10 = f[static_cast<std::size_t>(g.id(c.i + 1, c.j))];
    const Value f01 = f[static_cast<std::size_t>(g.id(c.i, c.j + 1))];
    const Value f11 = f[static_cast<std::size_t>(g.id(c.i + 1, c.j + 1))];
    return (1.0 - c.u) * (1.0 - c.v) * f00 + c.u * (1.0 - c.v) * f10 +
           (1.0 - c.u) * c.v * f01 + c.u * c.v * f11;
}

}  // namespace

double interpolate(const Grid& g, const ScalarField& f, const Vec2& p) {
    return interp_impl<ScalarField, double>(g, f, p);
}

Vec2 interpolate(const Grid& g, const VecField& f, const Vec2& p) {
    return interp_impl<VecField, Vec2>(g, f, p);
}

double norm_l2(const Grid& g, const ScalarField& f) {
    double acc = 0.0;
    for (int n = 0; n < g.nnodes(); ++n) {
        const double v = f[static_cast<std::size_t>(n)];
        acc += g.node_weight[static_cast<std::size_t>(n)] * v * v;
    }
    return std::sqrt(acc);
}

double norm_l2(const Grid& g, const VecField& f) {
    double acc = 0.0;
    for (int n = 0; n < g.nnodes(); ++n)
        acc += g.node_weight[static_cast<std::size_t>(n)] * norm2(f[static_cast<std::size_t>(n)]);
    return std::sqrt(acc);
}

double norm_l2(const Grid& g, const SymField& f) {
    double acc = 0.0;
    for (int n = 0; n < g.nnodes(); ++n) {
        const Sym2& t = f[static_cast<std::size_t>(n)];
        acc += g.node_weight[static_cast<std::size_t>(n)] *
               (t.t11 * t.t11 + 2.0 * t.t12 * t.t12 + t.t22 * t.t22);
    }
    return std::sqrt(acc);
}

double norm_h1(const Grid& g, const ScalarField& f) {
    const VecField gr = grad_scalar(g, f);
    const double a = norm_l2(g, f);
    const double b = norm_l2(g, gr);
    return std::sqrt(a * a + b * b);
}

double norm_h1(const Grid& g, const VecField& f) {
    const TensorField gr = grad_vec(g, f);
    double acc = 0.0;
    for (int n = 0; n < g.nnodes(); ++n) {
        const Mat2& m = gr[static_cast<std::size_t>(n)];
        acc += g.node_weight[static_cast<std::size_t>(n)] *
               (m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22);
    }
    const double a = norm_l2(g, f);
    return std::sqrt(a * a + acc);
}

double norm_max(const ScalarField& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::fabs(v));
    return m;
}

double norm_max(const VecField& f) {
    double m = 0.0;
    for (const Vec2& v : f) m = std::max({m, std::fabs(v.x), std::fabs(v.y)});
    return m;
}

double norm_max(const SymField& f) {
    double m = 0.0;
    for (const Sym2& t : f) m = std::max(m, max_abs(t));
    return m;
}

}  // namespace splash2d
