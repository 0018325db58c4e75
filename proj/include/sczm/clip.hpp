#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sczm {

using Polygon = std::vector<Eigen::Vector2d>;

double polygon_area(const Polygon& p);

bool polygon_is_convex(const Polygon& p);

/// Canonically oriented line a*x + b*y = c through two points: the carrier is
/// computed from the lexicographically smaller endpoint first, so clipping
/// against the same edge from either side produces bit-identical cut points.
struct HalfPlane {
  Eigen::Vector2d normal;  // points toward the kept side
  double offset;           // kept side: normal . x <= offset
  double signed_distance(const Eigen::Vector2d& x) const { return normal.dot(x) - offset; }
};

HalfPlane half_plane_left_of(const Eigen::Vector2d& a, const Eigen::Vector2d& b);

/// Sutherland-Hodgman clip of `subject` against one half-plane.
Polygon clip_half_plane(const Polygon& subject, const HalfPlane& hp);

/// Clip `subject` against a convex polygon (counter-clockwise).
/// Throws for non-convex clip regions.
Polygon clip_convex(const Polygon& subject, const Polygon& convex_clip);

/// Fan triangulation of a convex polygon from its lowest-index vertex.
std::vector<std::array<Eigen::Vector2d, 3>> fan_triangulate(const Polygon& p);

bool point_in_convex_polygon(const Eigen::Vector2d& x, const Polygon& p, double tol = 0.0);

}  // namespace sczm
