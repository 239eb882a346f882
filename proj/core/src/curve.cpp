#include "splash2d/curve.hpp"

#include <algorithm>
#include <cmath>

#include "splash2d/errors.hpp"
#include "splash2d/geometry.hpp"

namespace splash2d {

InterfaceCurve::InterfaceCurve(std::vector<Vec2> pts) : markers(std::move(pts)) {
    if (markers.size() < 16)
        throw GeometryError("interface curve needs at least 16 markers, got " +
                            std::to_string(markers.size()));
    const std::size_t n = markers.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (norm(markers[i] - markers[(i + 1) % n]) == 0.0)
            throw GeometryError("interface curve has coincident consecutive markers at index " +
                                std::to_string(i));
    }
    const double area = signed_area(markers);
    if (area == 0.0) throw GeometryError("interface curve has zero signed area");
    if (area < 0.0) std::reverse(markers.begin(), markers.end());
}

Vec2 InterfaceCurve::centroid() const {
    Vec2 c{0.0, 0.0};
    for (const Vec2& m : markers) c += m;
    return c / static_cast<double>(markers.size());
}

double InterfaceCurve::mean_spacing() const {
    double length = 0.0;
    const std::size_t n = markers.size();
    for (std::size_t i = 0; i < n; ++i) length += norm(markers[(i + 1) % n] - markers[i]);
    return length / static_cast<double>(n);
}

InterfaceCurve InterfaceCurve::translated(const Vec2& d) const {
    InterfaceCurve out;
    out.markers.reserve(markers.size());
    for (const Vec2& m : markers) out.markers.push_back(m + d);
    return out;
}

InterfaceCurve make_circle(const Vec2& center, double radius, int n) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * i / n;
        pts.push_back(center + Vec2{radius * std::cos(th), radius * std::sin(th)});
    }
    return InterfaceCurve(std::move(pts));
}

InterfaceCurve make_ellipse(const Vec2& center, double a, double b, int n) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * i / n;
        pts.push_back(center + Vec2{a * std::cos(th), b * std::sin(th)});
    }
    return InterfaceCurve(std::move(pts));
}

}  // namespace splash2d
