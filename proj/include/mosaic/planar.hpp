// Small 2D toolkit for convex polygons in a local tangent plane.
#pragma once

#include <span>
#include <vector>

namespace mosaic::planar {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Shoelace area; positive for counter-clockwise vertex order.
double signed_area(std::span<const Vec2> poly);

/// Intersection of two convex polygons (Sutherland-Hodgman). Both inputs may
/// be in either orientation; the result is counter-clockwise.
std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip);

}  // namespace mosaic::planar
