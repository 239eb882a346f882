#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "splash2d/algebra.hpp"

namespace splash2d {

/// Orientation of c relative to the directed segment a->b.
/// Double-precision predicate with a relative guard band; returns 0 when the
/// determinant is below the guard (treated as collinear).
inline int orientation(const Vec2& a, const Vec2& b, const Vec2& c, double guard = 1e-14) {
    const double d = cross(b - a, c - a);
    const double scale = norm(b - a) * std::max(norm(c - a), norm(c - b));
    if (std::fabs(d) <= guard * std::max(scale, 1e-300)) return 0;
    return d > 0.0 ? 1 : -1;
}

/// Proper or degenerate intersection of closed segments [a,b] and [c,d].
inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;

    auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        return std::min(p.x, r.x) - 1e-14 <= q.x && q.x <= std::max(p.x, r.x) + 1e-14 &&
               std::min(p.y, r.y) - 1e-14 <= q.y && q.y <= std::max(p.y, r.y) + 1e-14;
    };
    if (o1 == 0 && on_segment(a, c, b)) return true;
    if (o2 == 0 && on_segment(a, d, b)) return true;
    if (o3 == 0 && on_segment(c, a, d)) return true;
    if (o4 == 0 && on_segment(c, b, d)) return true;
    return false;
}

/// Distance between point p and segment [a,b].
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = norm2(ab);
    if (len2 == 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

inline double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c,
                                        const Vec2& d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

/// Signed area of a closed polygon (positive for counterclockwise).
inline double signed_area(const std::vector<Vec2>& pts) {
    double a = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = pts[i];
        const Vec2& q = pts[(i + 1) % n];
        a += cross(p, q);
    }
    return 0.5 * a;
}

/// True if the closed polyline has a self-intersection between
/// non-neighboring segments.
inline bool polyline_self_intersects(const std::vector<Vec2>& pts) {
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 2; k < n; ++k) {
            if (i == 0 && k == n - 1) continue;  // shared endpoint
            if (segments_intersect(pts[i], pts[(i + 1) % n], pts[k], pts[(k + 1) % n]))
                return true;
        }
    }
    return false;
}

}  // namespace splash2d
