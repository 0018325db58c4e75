#include "sczm/clip.hpp"

#include <array>
#include <cmath>

#include "sczm/errors.hpp"

namespace sczm {

double polygon_area(const Polygon& p) {
  double a = 0;
  const int n = static_cast<int>(p.size());
  for (int i = 0; i < n; ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % n];
    a += u.x() * v.y() - v.x() * u.y();
  }
  return 0.5 * a;
}

bool polygon_is_convex(const Polygon& p) {
  const int n = static_cast<int>(p.size());
  if (n < 3) return false;
  int sign = 0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d a = p[(i + 1) % n] - p[i];
    const Eigen::Vector2d b = p[(i + 2) % n] - p[(i + 1) % n];
    const double cross = a.x() * b.y() - a.y() * b.x();
    if (cross == 0) continue;
    const int s = cross > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return true;
}

HalfPlane half_plane_left_of(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  // canonical endpoint order, then flip the kept side if the order changed
  const bool swap = (b.x() < a.x()) || (b.x() == a.x() && b.y() < a.y());
  const Eigen::Vector2d& p = swap ? b : a;
  const Eigen::Vector2d& q = swap ? a : b;
  const Eigen::Vector2d t = q - p;
  Eigen::Vector2d n(t.y(), -t.x());  // right of p->q
  double c = n.dot(p);
  if (swap) {
    n = -n;
    c = -c;
  }
  return {n, c};
}

Polygon clip_half_plane(const Polygon& subject, const HalfPlane& hp) {
  Polygon out;
  const int n = static_cast<int>(subject.size());
  if (n == 0) return out;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d& cur = subject[i];
    const Eigen::Vector2d& nxt = subject[(i + 1) % n];
    const double dc = hp.signed_distance(cur);
    const double dn = hp.signed_distance(nxt);
    const bool cur_in = dc <= 0;
    const bool nxt_in = dn <= 0;
    if (cur_in) out.push_back(cur);
    if (cur_in != nxt_in) {
      const double t = dc / (dc - dn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

Polygon clip_convex(const Polygon& subject, const Polygon& convex_clip) {
  if (!polygon_is_convex(convex_clip))
    throw DegenerateGeometryError("clip region is not a convex polygon");
  // orient counter-clockwise
  Polygon clip = convex_clip;
  if (polygon_area(clip) < 0) std::reverse(clip.begin(), clip.end());
  Polygon result = subject;
  const int n = static_cast<int>(clip.size());
  for (int i = 0; i < n && !result.empty(); ++i)
    result = clip_half_plane(result, half_plane_left_of(clip[i], clip[(i + 1) % n]));
  return result;
}

std::vector<std::array<Eigen::Vector2d, 3>> fan_triangulate(const Polygon& p) {
  std::vector<std::array<Eigen::Vector2d, 3>> tris;
  const int n = static_cast<int>(p.size());
  for (int i = 1; i + 1 < n; ++i) tris.push_back({p[0], p[i], p[i + 1]});
  return tris;
}

bool point_in_convex_polygon(const Eigen::Vector2d& x, const Polygon& p, double tol) {
  const int n = static_cast<int>(p.size());
  const double orient = polygon_area(p) >= 0 ? 1.0 : -1.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d a = p[i], b = p[(i + 1) % n];
    const double cross = (b.x() - a.x()) * (x.y() - a.y()) - (b.y() - a.y()) * (x.x() - a.x());
    if (orient * cross < -tol) return false;
  }
  return true;
}

}  // namespace sczm
