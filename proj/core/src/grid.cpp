#include "splash2d/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splash2d/errors.hpp"
#include "splash2d/geometry.hpp"

namespace splash2d {

namespace {

/// Solve the small dense system N u = rhs in place (Gaussian elimination with
/// partial pivoting); used for the pole least-squares stencil.
void solve_dense(std::vector<double>& N, std::vector<double>& rhs, int n) {
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int r = k + 1; r < n; ++r)
            if (std::fabs(N[r * n + k]) > std::fabs(N[piv * n + k])) piv = r;
        if (piv != k) {
            for (int c = 0; c < n; ++c) std::swap(N[k * n + c], N[piv * n + c]);
            std::swap(rhs[k], rhs[piv]);
        }
        const double d = N[k * n + k];
        for (int r = k + 1; r < n; ++r) {
            const double m = N[r * n + k] / d;
            for (int c = k; c < n; ++c) N[r * n + c] -= m * N[k * n + c];
            rhs[r] -= m * rhs[k];
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        double s = rhs[k];
        for (int c = k + 1; c < n; ++c) s -= N[k * n + c] * rhs[c];
        rhs[k] = s / N[k * n + k];
    }
}

}  // namespace

Grid build_reference_grid(const InterfaceCurve& curve, int n_rings) {
    if (n_rings < 4) throw GeometryError("grid: need at least 4 rings");
    if (n_rings % 2 != 0) throw GeometryError("grid: ring count must be even");
    if (curve.size() % 2 != 0)
        throw GeometryError("grid: marker count must be even (coarse pressure space)");
    if (polyline_self_intersects(curve.markers))
        throw GeometryError("grid: curve is self-intersecting");

    Grid g;
    g.nb = static_cast<int>(curve.size());
    g.nr = n_rings;
    g.pole = curve.centroid();
    g.mean_spacing = curve.mean_spacing();

    g.nodes.resize(static_cast<std::size_t>(g.nnodes()));
    for (int i = 0; i < g.nb; ++i)
        g.nodes[static_cast<std::size_t>(i)] = curve.markers[static_cast<std::size_t>(i)];
    for (int j = 1; j < g.nr; ++j) {
        const double s = 1.0 - static_cast<double>(j) / g.nr;
        for (int i = 0; i < g.nb; ++i)
            g.nodes[static_cast<std::size_t>(j * g.nb + i)] =
                g.pole + s * (curve.markers[static_cast<std::size_t>(i)] - g.pole);
    }
    g.nodes[static_cast<std::size_t>(g.pole_id())] = g.pole;

    for (double jac : g.cell_jacobians()) {
        if (jac <= 0.0)
            throw GeometryError(
                "grid: nonpositive cell Jacobian (curve not starlike about its centroid)");
    }

    // Outward normals from the marker tangents (counterclockwise curve).
    g.normals.resize(static_cast<std::size_t>(g.nb));
    g.bdy_weight.resize(static_cast<std::size_t>(g.nb));
    for (int i = 0; i < g.nb; ++i) {
        const Vec2 t = curve.markers[static_cast<std::size_t>((i + 1) % g.nb)] -
                       curve.markers[static_cast<std::size_t>((i - 1 + g.nb) % g.nb)];
        g.normals[static_cast<std::size_t>(i)] = Vec2{t.y, -t.x} / norm(t);
        g.bdy_weight[static_cast<std::size_t>(i)] = 0.5 * norm(t);
    }

    // Area quadrature: distribute each cell's area onto its corners.
    g.node_weight.assign(static_cast<std::size_t>(g.nnodes()), 0.0);
    for (int j = 0; j < g.nr; ++j) {
        for (int i = 0; i < g.nb; ++i) {
            const Vec2 p00 = g.nodes[static_cast<std::size_t>(g.id(i, j))];
            const Vec2 p10 = g.nodes[static_cast<std::size_t>(g.id(i + 1, j))];
            const Vec2 p01 = g.nodes[static_cast<std::size_t>(g.id(i, j + 1))];
            const Vec2 p11 = g.nodes[static_cast<std::size_t>(g.id(i + 1, j + 1))];
            const double area = 0.5 * std::fabs(cross(p11 - p00, p01 - p10));
            g.node_weight[static_cast<std::size_t>(g.id(i, j))] += 0.25 * area;
            g.node_weight[static_cast<std::size_t>(g.id(i + 1, j))] += 0.25 * area;
            g.node_weight[static_cast<std::size_t>(g.id(i, j + 1))] += 0.25 * area;
            g.node_weight[static_cast<std::size_t>(g.id(i + 1, j + 1))] += 0.25 * area;
        }
    }

    g.build_stencils();
    g.build_interp_tables();
    return g;
}

std::vector<double> Grid::cell_jacobians() const {
    std::vector<double> jac;
    jac.reserve(static_cast<std::size_t>(nb * nr));
    for (int j = 0; j < nr; ++j) {
        for (int i = 0; i < nb; ++i) {
            const Vec2 p00 = nodes[static_cast<std::size_t>(id(i, j))];
            const Vec2 p10 = nodes[static_cast<std::size_t>(id(i + 1, j))];
            const Vec2 p01 = nodes[static_cast<std::size_t>(id(i, j + 1))];
            const Vec2 p11 = nodes[static_cast<std::size_t>(id(i + 1, j + 1))];
            const Vec2 xi = 0.5 * ((p10 + p11) - (p00 + p01));
            const Vec2 eta = 0.5 * ((p01 + p11) - (p00 + p10));
            jac.push_back(cross(xi, eta));
        }
    }
    return jac;
}

void Grid::build_stencils() {
    const int nn = nnodes();
    sten_dx_.assign(static_cast<std::size_t>(nn), {});
    sten_dy_.assign(static_cast<std::size_t>(nn), {});
    sten_lap_.assign(static_cast<std::size_t>(nn), {});

    auto add = [](Stencil& s, int node, double w) {
        if (w == 0.0) return;
        for (auto& e : s) {
            if (e.id == node) {
                e.w += w;
                return;
            }
        }
        s.push_back({node, w});
    };

    for (int j = 0; j < nr; ++j) {
        for (int i = 0; i < nb; ++i) {
            const int node = id(i, j);
            const Vec2 x = nodes[static_cast<std::size_t>(node)];

            // Mapping derivatives by index-space differences.
            const Vec2 xp = nodes[static_cast<std::size_t>(id(i + 1, j))];
            const Vec2 xm = nodes[static_cast<std::size_t>(id(i - 1, j))];
            const Vec2 x_xi = 0.5 * (xp - xm);

            // eta stencils: central inside, one-sided (second order) on the
            // boundary ring so the Laplacian is defined there as well.
            std::vector<std::pair<int, double>> eta_st, eta2_st;
            if (j == 0) {
                eta_st = {{id(i, 0), -1.5}, {id(i, 1), 2.0}, {id(i, 2), -0.5}};
                eta2_st = {{id(i, 0), 2.0}, {id(i, 1), -5.0}, {id(i, 2), 4.0}, {id(i, 3), -1.0}};
            } else {
                eta_st = {{id(i, j + 1), 0.5}, {id(i, j - 1), -0.5}};
                eta2_st = {{id(i, j + 1), 1.0}, {node, -2.0}, {id(i, j - 1), 1.0}};
            }
            auto apply_to_nodes = [&](const std::vector<std::pair<int, double>>& st) {
                Vec2 acc;
                for (auto& [nid, w] : st) acc += w * nodes[static_cast<std::size_t>(nid)];
                return acc;
            };
            const Vec2 x_eta = apply_to_nodes(eta_st);

            const Mat2 jm{x_xi.x, x_eta.x, x_xi.y, x_eta.y};
            const double dj = det(jm);
            if (std::fabs(dj) < 1e-300)
                throw GeometryError("grid: degenerate mapping Jacobian");
            const Mat2 inv = inverse(jm);
            const Vec2 grad_xi{inv.a11, inv.a12};   // (xi_x, xi_y)
            const Vec2 grad_eta{inv.a21, inv.a22};  // (eta_x, eta_y)

            Stencil& dx = sten_dx_[static_cast<std::size_t>(node)];
            Stencil& dy = sten_dy_[static_cast<std::size_t>(node)];
            add(dx, id(i + 1, j), 0.5 * grad_xi.x);
            add(dx, id(i - 1, j), -0.5 * grad_xi.x);
            add(dy, id(i + 1, j), 0.5 * grad_xi.y);
            add(dy, id(i - 1, j), -0.5 * grad_xi.y);
            for (auto& [nid, w] : eta_st) {
                add(dx, nid, w * grad_eta.x);
                add(dy, nid, w * grad_eta.y);
            }

            // Curvilinear Laplacian: A f_xixi + 2B f_xieta + C f_etaeta
            // + D f_xi + E f_eta with D, E from the mapping curvature.
            {
                const Vec2 x_xixi = xp - 2.0 * x + xm;
                const Vec2 x_etaeta = apply_to_nodes(eta2_st);
                // Cross derivative: xi-central difference of the eta stencil.
                Vec2 x_xieta;
                for (auto& [nid, w] : eta_st) {
                    const int jj = nid >= nb * nr ? nr : nid / nb;
                    const int ii = nid >= nb * nr ? 0 : nid % nb;
                    if (nid >= nb * nr) {
                        continue;  // pole contributes equally left/right
                    }
                    x_xieta += (0.5 * w) * (nodes[static_cast<std::size_t>(id(ii + 1, jj))] -
                                            nodes[static_cast<std::size_t>(id(ii - 1, jj))]);
                }

                const double A = norm2(grad_xi);
                const double B = dot(grad_xi, grad_eta);
                const double C = norm2(grad_eta);
                const Vec2 S = A * x_xixi + 2.0 * B * x_xieta + C * x_etaeta;
                const double D = -dot(S, grad_xi);
                const double E = -dot(S, grad_eta);

                Stencil& lp = sten_lap_[static_cast<std::size_t>(node)];
                add(lp, id(i + 1, j), A);
                add(lp, id(i - 1, j), A);
                add(lp, node, -2.0 * A);
                for (auto& [nid, w] : eta2_st) add(lp, nid, C * w);
                for (auto& [nid, w] : eta_st) {
                    const int jj = nid >= nb * nr ? nr : nid / nb;
                    const int ii = nid >= nb * nr ? 0 : nid % nb;
                    if (nid >= nb * nr) continue;
                    add(lp, id(ii + 1, jj), B * w);
                    add(lp, id(ii - 1, jj), -B * w);
                }
                add(lp, id(i + 1, j), 0.5 * D);
                add(lp, id(i - 1, j), -0.5 * D);
                for (auto& [nid, w] : eta_st) add(lp, nid, w * E);
            }
        }
    }

    // Pole node: least-squares quadratic fit over the two innermost rings.
    const int pid = pole_id();
    std::vector<int> ring_ids;
    for (int j = nr - 1; j >= nr - 2; --j)
        for (int i = 0; i < nb; ++i) ring_ids.push_back(id(i, j));

    double hscale = 0.0;
    for (int nid : ring_ids) hscale += norm(nodes[static_cast<std::size_t>(nid)] - pole);
    hscale /= static_cast<double>(ring_ids.size());

    const int m = static_cast<int>(ring_ids.size());
    std::vector<double> M(static_cast<std::size_t>(m) * 5);
    for (int k = 0; k < m; ++k) {
        const Vec2 d = (nodes[static_cast<std::size_t>(ring_ids[static_cast<std::size_t>(k)])] -
                        pole) / hscale;
        M[static_cast<std::size_t>(k * 5 + 0)] = d.x;
        M[static_cast<std::size_t>(k * 5 + 1)] = d.y;
        M[static_cast<std::size_t>(k * 5 + 2)] = 0.5 * d.x * d.x;
        M[static_cast<std::size_t>(k * 5 + 3)] = d.x * d.y;
        M[static_cast<std::size_t>(k * 5 + 4)] = 0.5 * d.y * d.y;
    }
    // Rows r of pinv = (M^T M)^{-1} M^T give the fit coefficients as weights
    // over (f_k - f_pole).
    std::vector<double> pinv(5 * static_cast<std::size_t>(m));
    for (int col = 0; col < m; ++col) {
        std::vector<double> N(25, 0.0);
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) {
                double s = 0.0;
                for (int k = 0; k < m; ++k)
                    s += M[static_cast<std::size_t>(k * 5 + a)] *
                         M[static_cast<std::size_t>(k * 5 + b)];
                N[static_cast<std::size_t>(a * 5 + b)] = s;
            }
        std::vector<double> rhs(5);
        for (int a = 0; a < 5; ++a) rhs[static_cast<std::size_t>(a)] =
            M[static_cast<std::size_t>(col * 5 + a)];
        solve_dense(N, rhs, 5);
        for (int a = 0; a < 5; ++a)
            pinv[static_cast<std::size_t>(a * m + col)] = rhs[static_cast<std::size_t>(a)];
    }

    Stencil& pdx = sten_dx_[static_cast<std::size_t>(pid)];
    Stencil& pdy = sten_dy_[static_cast<std::size_t>(pid)];
    Stencil& plp = sten_lap_[static_cast<std::size_t>(pid)];
    double sx = 0.0, sy = 0.0, sl = 0.0;
    for (int k = 0; k < m; ++k) {
        const double wx = pinv[static_cast<std::size_t>(0 * m + k)] / hscale;
        const double wy = pinv[static_cast<std::size_t>(1 * m + k)] / hscale;
        const double wl = (pinv[static_cast<std::size_t>(2 * m + k)] +
                           pinv[static_cast<std::size_t>(4 * m + k)]) / (hscale * hscale);
        add(pdx, ring_ids[static_cast<std::size_t>(k)], wx);
        add(pdy, ring_ids[static_cast<std::size_t>(k)], wy);
        add(plp, ring_ids[static_cast<std::size_t>(k)], wl);
        sx += wx;
        sy += wy;
        sl += wl;
    }
    add(pdx, pid, -sx);
    add(pdy, pid, -sy);
    add(plp, pid, -sl);
}

void Grid::build_interp_tables() {
    wedge_angle_.resize(static_cast<std::size_t>(nb));
    wedge_index_.resize(static_cast<std::size_t>(nb));
    std::vector<int> order(static_cast<std::size_t>(nb));
    std::vector<double> ang(static_cast<std::size_t>(nb));
    for (int i = 0; i < nb; ++i) {
        const Vec2 d = nodes[static_cast<std::size_t>(i)] - pole;
        ang[static_cast<std::size_t>(i)] = std::atan2(d.y, d.x);
        order[static_cast<std::size_t>(i)] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return ang[static_cast<std::size_t>(a)] <
                                         ang[static_cast<std::size_t>(b)]; });
    for (int k = 0; k < nb; ++k) {
        wedge_angle_[static_cast<std::size_t>(k)] = ang[static_cast<std::size_t>(
            order[static_cast<std::size_t>(k)])];
        wedge_index_[static_cast<std::size_t>(k)] = order[static_cast<std::size_t>(k)];
    }
}

bool Grid::invert_cell(int i, int j, const Vec2& p, double& u, double& v) const {
    const Vec2 a = nodes[static_cast<std::size_t>(id(i, j))];
    const Vec2 b = nodes[static_cast<std::size_t>(id(i + 1, j))];
    const Vec2 c = nodes[static_cast<std::size_t>(id(i, j + 1))];
    const Vec2 d = nodes[static_cast<std::size_t>(id(i + 1, j + 1))];
    const double scale = std::max({norm(b - a), norm(c - a), 1e-300});

    if (j + 1 >= nr) {
        // Pole cell: x(u,v) = (1-v)(a + u(b-a)) + v*pole, invertible directly.
        const Vec2 rel = p - pole;
        const double den = cross(b - a, rel);
        if (std::fabs(den) < 1e-300) {
            if (norm(rel) < 1e-14 * scale) {
                u = 0.0;
                v = 1.0;
                return true;
            }
            // rel parallel to the chord direction: project.
            u = dot(p - a, b - a) / norm2(b - a);
            v = 0.0;
        } else {
            u = -cross(a - pole, rel) / den;
            const Vec2 chord = a - pole + u * (b - a);
            const double cn = norm(chord);
            v = cn < 1e-300 ? 1.0 : 1.0 - norm(rel) / cn;
        }
    } else {
        u = 0.5;
        v = 0.5;
        const Vec2 e1 = b - a, e2 = c - a, e3 = a - b - c + d;
        for (int it = 0; it < 30; ++it) {
            const Vec2 r = a + u * e1 + v * e2 + (u * v) * e3 - p;
            if (norm(r) < 1e-13 * scale) break;
            const Vec2 xu = e1 + v * e3;
            const Vec2 xv = e2 + u * e3;
            const double dj = cross(xu, xv);
            if (std::fabs(dj) < 1e-300) return false;
            u -= (r.x * xv.y - r.y * xv.x) / dj;
            v -= (xu.x * r.y - xu.y * r.x) / dj;
        }
    }
    const double tol = 1e-9;
    return u >= -tol && u <= 1.0 + tol && v >= -tol && v <= 1.0 + tol;
}

Grid::CellCoord Grid::locate(const Vec2& p) const {
    const Vec2 rel = p - pole;
    const double r = norm(rel);
    if (r < 1e-300) return {0, nr - 1, 0.0, 1.0};

    const double th = std::atan2(rel.y, rel.x);
    const auto it = std::upper_bound(wedge_angle_.begin(), wedge_angle_.end(), th);
    int k = static_cast<int>(it - wedge_angle_.begin()) - 1;
    if (k < 0) k = nb - 1;  // wrapped below the smallest angle
    const int i0 = wedge_index_[static_cast<std::size_t>(k)];

    // Radial fraction from the ray-chord intersection in this wedge.
    const Vec2 m0 = nodes[static_cast<std::size_t>(id(i0, 0))];
    const Vec2 m1 = nodes[static_cast<std::size_t>(id(i0 + 1, 0))];
    const double den = cross(m1 - m0, rel);
    double s = 1.0;
    if (std::fabs(den) > 1e-300) {
        const double uu = -cross(m0 - pole, rel) / den;
        const Vec2 bpt = m0 + uu * (m1 - m0) - pole;
        const double bn = norm(bpt);
        if (bn > 1e-300) s = r / bn;
    }
    if (s > 1.0 + 1e-9) throw OutOfDomain("interpolate: point outside the grid hull");

    int j0 = static_cast<int>(std::floor((1.0 - std::min(s, 1.0)) * nr));
    j0 = std::clamp(j0, 0, nr - 1);

    for (int dj = 0; dj <= nr; ++dj) {
        for (int sign = -1; sign <= 1; sign += 2) {
            const int j = j0 + (sign == 1 ? dj : -dj);
            if (j < 0 || j >= nr) continue;
            for (int di = -1; di <= 1; ++di) {
                const int i = ((i0 + di) % nb + nb) % nb;
                double u, v;
                if (invert_cell(i, j, p, u, v))
                    return {i, j, std::clamp(u, 0.0, 1.0), std::clamp(v, 0.0, 1.0)};
            }
            if (dj == 0) break;  // j0-dj == j0+dj
        }
    }
    throw OutOfDomain("interpolate: point not located in any grid cell");
}

}  // namespace splash2d
