#pragma once

#include <vector>

#include "splash2d/algebra.hpp"
#include "splash2d/grid.hpp"

namespace splash2d {

using ScalarField = std::vector<double>;
using VecField = std::vector<Vec2>;
using TensorField = std::vector<Mat2>;
using SymField = std::vector<Sym2>;

/// Gradients of the three stored components of a symmetric tensor field.
struct SymGrad {
    VecField g11, g12, g22;
};

/// One simulation state on the common grid: velocity, pressure, elastic
/// stress and the conformal-Lagrangian flux.
struct FieldSet {
    VecField v;
    ScalarField q;
    SymField T;
    VecField X;
};

ScalarField zero_scalar(const Grid& g);
VecField zero_vec(const Grid& g);
SymField zero_sym(const Grid& g);

/// Identity flux: X(node) = node position.
VecField identity_flux(const Grid& g);

// Stencil application. Gradients are defined at every node (one-sided at the
// boundary, least-squares at the pole); the Laplacian only at interior nodes.
double apply_stencil(const Grid::Stencil& s, const ScalarField& f);
VecField grad_scalar(const Grid& g, const ScalarField& f);
TensorField grad_vec(const Grid& g, const VecField& v);  // (grad v)_{kj} = d v_k / d a_j
SymGrad grad_sym(const Grid& g, const SymField& t);
ScalarField laplacian_scalar(const Grid& g, const ScalarField& f);
VecField laplacian_vec(const Grid& g, const VecField& v);

/// Pulled-back Laplacian of u with respect to the flux-composed mapping
/// (grid indices -> X values): the conformal-coordinate Laplacian evaluated
/// along the flux. At X = identity_flux this is exactly the grid's own
/// 9-point curvilinear Laplacian, so identity-flux splittings cancel.
VecField flux_laplacian(const Grid& g, const VecField& X, const VecField& u);

// Bilinear interpolation in grid indices (exact on fields linear in the grid
// coordinates). Throws OutOfDomain outside the hull.
double interpolate(const Grid& g, const ScalarField& f, const Vec2& p);
Vec2 interpolate(const Grid& g, const VecField& f, const Vec2& p);

// Area-weighted discrete norms.
double norm_l2(const Grid& g, const ScalarField& f);
double norm_l2(const Grid& g, const VecField& f);
double norm_l2(const Grid& g, const SymField& f);
double norm_h1(const Grid& g, const ScalarField& f);
double norm_h1(const Grid& g, const VecField& f);
double norm_max(const ScalarField& f);
double norm_max(const VecField& f);
double norm_max(const SymField& f);

}  // namespace splash2d
