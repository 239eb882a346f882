#include "splash2d/conformal.hpp"

#include <cmath>
#include <vector>

#include "splash2d/errors.hpp"
#include "splash2d/geometry.hpp"

namespace splash2d {

BranchMap::BranchMap(const Vec2& bp, const Vec2& cut, bool identity)
    : branch_point(bp), cut_direction(cut), identity_map(identity) {
    const double n = norm(cut_direction);
    if (std::fabs(n - 1.0) > 1e-12)
        throw ParamError("branch map: cut_direction must have unit norm");
}

double BranchMap::cut_distance(const Vec2& z) const {
    const Vec2 w = z - branch_point;
    const double along = dot(w, cut_direction);
    if (along <= 0.0) return norm(w);  // nearest ray point is the branch point
    return std::fabs(cross(cut_direction, w));
}

Vec2 BranchMap::forward(const Vec2& z) const {
    if (identity_map) return z;
    if (cut_distance(z) < 1e-12)
        throw BranchCutError("conformal forward: point lies on the branch cut");
    const Complex w = to_complex(z - branch_point);
    // Rotate the cut direction onto the negative real axis, take the
    // principal square root there, and rotate back by half the angle.
    const double phi = std::atan2(cut_direction.y, cut_direction.x);
    const Complex rot = std::polar(1.0, -(phi - M_PI));
    const Complex root = std::sqrt(w * rot) * std::polar(1.0, 0.5 * (phi - M_PI));
    return to_vec(root);
}

Vec2 BranchMap::inverse(const Vec2& zt) const {
    if (identity_map) return zt;
    const Complex w = to_complex(zt);
    return to_vec(w * w) + branch_point;
}

Mat2 BranchMap::jacobian(const Vec2& zt) const {
    if (identity_map) return Mat2::identity();
    if (norm(zt) < 1e-12)
        throw SingularJacobian("conformal jacobian: evaluation at the branch point");
    const Complex d = 1.0 / (2.0 * to_complex(zt));
    return complex_as_matrix(d);
}

double BranchMap::q_squared(const Vec2& zt) const {
    if (identity_map) return 1.0;
    const double r2 = norm2(zt);
    if (r2 < 1e-24)
        throw SingularJacobian("conformal q_squared: evaluation at the branch point");
    return 1.0 / (4.0 * r2);
}

Mat2 BranchMap::jacobian_derivative(const Vec2& zt, int k) const {
    if (identity_map) return Mat2::zero();
    if (norm(zt) < 1e-12)
        throw SingularJacobian("conformal jacobian_derivative: evaluation at the branch point");
    const Complex z = to_complex(zt);
    const Complex dp = -1.0 / (2.0 * z * z);  // d/dz of 1/(2z)
    // Holomorphic derivative: d/dx = f', d/dy = i f'.
    return complex_as_matrix(k == 0 ? dp : Complex(0.0, 1.0) * dp);
}

Classification classify_physical_detail(const BranchMap& map, const InterfaceCurve& curve,
                                        double gap_tol) {
    const std::size_t n = curve.size();
    std::vector<Vec2> phys(n);
    for (std::size_t i = 0; i < n; ++i) phys[i] = map.inverse(curve.markers[i]);

    std::vector<double> seglen(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        seglen[i] = norm(phys[(i + 1) % n] - phys[i]);
        total += seglen[i];
    }
    if (gap_tol <= 0.0) gap_tol = 2.0 * total / static_cast<double>(n);

    if (polyline_self_intersects(phys)) return {DomainClass::SelfIntersecting, 0.0};

    // Cumulative arc position of segment midpoints.
    std::vector<double> arc(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        arc[i] = acc + 0.5 * seglen[i];
        acc += seglen[i];
    }

    double min_gap = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 2; k < n; ++k) {
            if (i == 0 && k == n - 1) continue;
            const double along = std::fabs(arc[k] - arc[i]);
            const double arc_sep = std::min(along, total - along);
            // Neighbor window scaled by the local marker spacing (the curve
            // may mix very fine and very coarse regions).
            if (arc_sep < 4.0 * std::max(seglen[i], seglen[k])) continue;
            const double d = segment_segment_distance(phys[i], phys[(i + 1) % n], phys[k],
                                                      phys[(k + 1) % n]);
            // Distinct arcs come close only by shortcutting across the domain.
            if (d < 0.5 * arc_sep) min_gap = std::min(min_gap, d);
        }
    }
    if (min_gap <= gap_tol) return {DomainClass::SplashTangent, min_gap};
    return {DomainClass::Regular, min_gap};
}

DomainClass classify_physical(const BranchMap& map, const InterfaceCurve& curve,
                              double gap_tol) {
    return classify_physical_detail(map, curve, gap_tol).verdict;
}

const char* to_string(DomainClass c) {
    switch (c) {
        case DomainClass::Regular: return "regular";
        case DomainClass::SplashTangent: return "splash_tangent";
        case DomainClass::SelfIntersecting: return "self_intersecting";
    }
    return "unknown";
}

}  // namespace splash2d
