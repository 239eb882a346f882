#pragma once

#include <vector>

#include "splash2d/algebra.hpp"

namespace splash2d {

/// Closed marker polyline for the reference boundary (conformal coordinates)
/// or any evolved interface. Always stored counterclockwise.
struct InterfaceCurve {
    std::vector<Vec2> markers;

    InterfaceCurve() = default;
    explicit InterfaceCurve(std::vector<Vec2> pts);

    std::size_t size() const { return markers.size(); }
    Vec2 centroid() const;
    double mean_spacing() const;

    /// Translate every marker by d.
    InterfaceCurve translated(const Vec2& d) const;
};

/// Uniformly parameterized circle, counterclockwise.
InterfaceCurve make_circle(const Vec2& center, double radius, int n);

/// Axis-aligned ellipse with semi-axes (a, b), counterclockwise.
InterfaceCurve make_ellipse(const Vec2& center, double a, double b, int n);

}  // namespace splash2d
