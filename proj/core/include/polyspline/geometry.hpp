#pragma once

#include <span>
#include <vector>

#include "polyspline/types.hpp"

namespace polyspline::geometry {

/// z-component of (b - a) x (c - a); positive when a, b, c turn left.
inline double orient(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

double signed_area(std::span<const Vec2> polygon);
Vec2 area_centroid(std::span<const Vec2> polygon);
Vec2 vertex_average(std::span<const Vec2> polygon);
double diameter(std::span<const Vec2> polygon);
double perimeter(std::span<const Vec2> polygon);

/// Strict point-in-polygon (even-odd rule); points on the boundary are
/// reported as outside.
bool point_in_polygon(std::span<const Vec2> polygon, const Vec2& p);
double distance_to_boundary(std::span<const Vec2> polygon, const Vec2& p);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// True when the open segments (p0,p1) and (q0,q1) cross at a single interior
/// point of both. Touching at endpoints or collinear overlap does not count.
bool segments_cross(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1, double eps = 1e-12);

/// Sutherland-Hodgman clip of a convex polygon against the half-plane to the
/// left of the directed line a->b.
std::vector<Vec2> clip_left_of(std::span<const Vec2> polygon, const Vec2& a, const Vec2& b, double eps);

} // namespace polyspline::geometry
