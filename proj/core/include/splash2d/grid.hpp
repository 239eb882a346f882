#pragma once

#include <vector>

#include "splash2d/algebra.hpp"
#include "splash2d/curve.hpp"

namespace splash2d {

/// Body-fitted curvilinear grid over the reference domain: logically annular,
/// index i runs along the boundary parameterization (periodic, nb nodes) and
/// index j along an inward coordinate (j = 0 is the boundary ring, j = nr is
/// the single pole node at the marker centroid). Rings are scaled copies of
/// the marker polyline, which requires the curve to be starlike about its
/// centroid; violations surface as nonpositive cell Jacobians.
class Grid {
   public:
    struct StencilEntry {
        int id;
        double w;
    };
    using Stencil = std::vector<StencilEntry>;

    struct CellCoord {
        int i, j;
        double u, v;  // bilinear coordinates inside the cell
    };

    int nb = 0;
    int nr = 0;
    Vec2 pole;
    std::vector<Vec2> nodes;       // nb*nr + 1, ring-major; pole last
    std::vector<Vec2> normals;     // outward unit normal per boundary node
    std::vector<double> node_weight;  // area quadrature weight per node
    std::vector<double> bdy_weight;   // arclength weight per boundary node
    double mean_spacing = 0.0;        // mean boundary marker spacing

    int nnodes() const { return nb * nr + 1; }
    int pole_id() const { return nb * nr; }
    int id(int i, int j) const {
        if (j >= nr) return pole_id();
        return j * nb + ((i % nb) + nb) % nb;
    }
    bool is_boundary(int node) const { return node < nb; }

    const Stencil& ddx(int node) const { return sten_dx_[node]; }
    const Stencil& ddy(int node) const { return sten_dy_[node]; }
    const Stencil& lap(int node) const { return sten_lap_[node]; }

    /// Signed Jacobians of all cells (positive for a valid grid).
    std::vector<double> cell_jacobians() const;

    CellCoord locate(const Vec2& p) const;

    friend Grid build_reference_grid(const InterfaceCurve& curve, int n_rings);

   private:
    std::vector<Stencil> sten_dx_, sten_dy_, sten_lap_;
    // Interpolation support: markers sorted by angle about the pole.
    std::vector<double> wedge_angle_;
    std::vector<int> wedge_index_;

    void build_stencils();
    void build_interp_tables();
    bool invert_cell(int i, int j, const Vec2& p, double& u, double& v) const;
};

/// Build the grid for a validated curve; n_rings controls the inward
/// resolution (n_rings >= 4). Throws GeometryError for self-intersecting or
/// non-starlike curves.
Grid build_reference_grid(const InterfaceCurve& curve, int n_rings);

}  // namespace splash2d
