#pragma once

#include <vector>

#include "gspt/geometry.hpp"

namespace gspt {

using Polyline = std::vector<Vec2>;

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Distance from p to a closed polyline (last vertex joined to the first).
double point_polyline_distance(const Vec2& p, const Polyline& poly, bool closed = true);

/// Symmetric Hausdorff distance between two closed polylines, vertices against segments.
/// Uses a uniform bucket grid over the segments; exact for the discrete metric.
double hausdorff_distance(const Polyline& a, const Polyline& b);

/// Winding number of the closed polyline around p (counter-clockwise positive).
int winding_number(const Polyline& poly, const Vec2& p);

double arclength(const Polyline& poly, bool closed = false);

/// Axis-aligned bounds of the vertices.
Window bounds(const Polyline& poly);

}  // namespace gspt
