#include <doctest.h>

#include <cmath>

#include "splash2d/compat.hpp"

using namespace splash2d;

namespace {
const BranchMap kMap({0.0, 0.0}, {-1.0, 0.0});

Grid circle_grid(int n = 48, const Vec2& c = {2.0, 0.0}, double r = 0.7) {
    return build_reference_grid(make_circle(c, r, n), n / 2);
}
}  // namespace

TEST_CASE("rest state with identity deformation passes with zero residuals") {
    const Grid g = circle_grid();
    Params p;
    const TensorField F0(static_cast<std::size_t>(g.nnodes()), Mat2::identity());
    const CompatReport rep =
        check_compatibility(g, kMap, zero_vec(g), zero_sym(g), p, F0);
    CHECK(rep.div_u == 0.0);
    CHECK(rep.div_f < 1e-13);  // stencil weight rounding on a constant field
    CHECK(rep.det_f == 0.0);
    CHECK(rep.traction_tangential == 0.0);
    CHECK(rep.pass);
}

TEST_CASE("rigid rotation is compatible: symmetric gradient vanishes") {
    const Grid g = circle_grid();
    Params p;
    VecField v0(static_cast<std::size_t>(g.nnodes()));
    for (int n = 0; n < g.nnodes(); ++n) {
        const Vec2 z = kMap.inverse(g.nodes[static_cast<std::size_t>(n)]);
        v0[static_cast<std::size_t>(n)] = perp(z);  // omega = 1 about the origin
    }
    const CompatReport rep = check_compatibility(g, kMap, v0, zero_sym(g), p);
    // Divergence residual is discretization-level noise.
    CHECK(rep.div_u < 5e-3);
    // grad u + grad u^T = 0 for rigid rotation, so the tangential traction
    // residual carries only the same discretization noise.
    CHECK(rep.traction_tangential < 5e-3);
}

TEST_CASE("uniaxial stretching fails with div residual one") {
    const Grid g = circle_grid();
    Params p;
    VecField v0(static_cast<std::size_t>(g.nnodes()));
    for (int n = 0; n < g.nnodes(); ++n) {
        const Vec2 z = kMap.inverse(g.nodes[static_cast<std::size_t>(n)]);
        v0[static_cast<std::size_t>(n)] = {z.x, 0.0};
    }
    const CompatReport rep = check_compatibility(g, kMap, v0, zero_sym(g), p);
    CHECK(rep.div_u == doctest::Approx(1.0).epsilon(1e-2));
    CHECK_FALSE(rep.pass);
}

TEST_CASE("constant isotropic stress keeps the tangential traction balanced") {
    const Grid g = circle_grid();
    Params p;
    const SymField T0(static_cast<std::size_t>(g.nnodes()), Sym2{0.3, 0.0, 0.3});
    const CompatReport rep = check_compatibility(g, kMap, zero_vec(g), T0, p);
    CHECK(rep.traction_tangential < 1e-14);
    CHECK(rep.pass);
}
