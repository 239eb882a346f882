#pragma once

#include "splash2d/algebra.hpp"
#include "splash2d/curve.hpp"

namespace splash2d {

enum class DomainClass { Regular, SplashTangent, SelfIntersecting };

/// Branch of sqrt(z - branch_point) with the cut along the ray from
/// branch_point in direction cut_direction. The inverse z = zt^2 + branch_point
/// is entire, so everything downstream of the reference domain only ever needs
/// the inverse, the Jacobian and the weight Q^2 evaluated at conformal points.
///
/// identity_map mode replaces the map by the identity (J = I, Q^2 = 1); it is
/// test-only and documented as such in the scenario schema.
struct BranchMap {
    Vec2 branch_point{0.0, 0.0};
    Vec2 cut_direction{-1.0, 0.0};
    bool identity_map = false;

    BranchMap() = default;
    BranchMap(const Vec2& bp, const Vec2& cut, bool identity = false);

    /// zt = sqrt(z - branch_point) on the branch continuous off the cut.
    Vec2 forward(const Vec2& z) const;

    /// z = zt^2 + branch_point.
    Vec2 inverse(const Vec2& zt) const;

    /// Real 2x2 representation of dP/dz = 1/(2 zt) at the conformal point zt.
    Mat2 jacobian(const Vec2& zt) const;

    /// Q^2 = |dP/dz|^2 = 1/(4 |zt|^2).
    double q_squared(const Vec2& zt) const;

    /// d(J^P)/d(zt_k), k in {0,1}: derivative of the Jacobian entries with
    /// respect to the conformal coordinates.
    Mat2 jacobian_derivative(const Vec2& zt, int k) const;

    /// Distance from z to the branch cut ray.
    double cut_distance(const Vec2& z) const;
};

/// Map the conformal curve to physical coordinates through the inverse and
/// classify the result. A proper crossing is authoritative for
/// SelfIntersecting; SplashTangent flags a gap <= gap_tol between genuinely
/// distinct arcs (pairs whose straight-line distance is under half their
/// arc separation). gap_tol <= 0 selects the default 2x mean physical
/// marker spacing.
DomainClass classify_physical(const BranchMap& map, const InterfaceCurve& curve_conformal,
                              double gap_tol = 0.0);

/// Classification plus the measured minimum distinct-arc gap (for reports).
struct Classification {
    DomainClass verdict;
    double min_gap;
};
Classification classify_physical_detail(const BranchMap& map,
                                        const InterfaceCurve& curve_conformal,
                                        double gap_tol = 0.0);

const char* to_string(DomainClass c);

}  // namespace splash2d
