#include "sczm/classify.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

#include "sczm/errors.hpp"
#include "sczm/io_util.hpp"

namespace sczm {

std::string to_string(Sideness s) {
  switch (s) {
    case Sideness::In: return "IN";
    case Sideness::Out: return "OUT";
    default: return "ON";
  }
}

// ---------------------------------------------------------------------------
// BoundaryRep
// ---------------------------------------------------------------------------

template <int DIM>
typename BoundaryRep<DIM>::Point BoundaryRep<DIM>::facet_centroid(int f) const {
  Point c = Point::Zero();
  for (int i = 0; i < DIM; ++i) c += vertices[facets[f][i]];
  return c / DIM;
}

template <int DIM>
std::pair<typename BoundaryRep<DIM>::Point, double> BoundaryRep<DIM>::facet_ball(int f) const {
  const Point c = facet_centroid(f);
  double r = 0;
  for (int i = 0; i < DIM; ++i) r = std::max(r, (vertices[facets[f][i]] - c).norm());
  return {c, r};
}

template <int DIM>
void BoundaryRep<DIM>::validate() const {
  if constexpr (DIM == 2) {
    std::vector<int> degree(vertices.size(), 0);
    for (const auto& f : facets) {
      if ((vertices[f[1]] - vertices[f[0]]).norm() == 0.0)
        throw DegenerateGeometryError("zero-length boundary segment");
      ++degree[f[0]];
      ++degree[f[1]];
    }
    for (size_t v = 0; v < degree.size(); ++v)
      if (degree[v] % 2 != 0)
        throw TopologyError("boundary not watertight at vertex " + std::to_string(v));
  } else {
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& f : facets) {
      const auto& a = vertices[f[0]];
      const auto& b = vertices[f[1]];
      const auto& c = vertices[f[2]];
      if (((b - a).cross(c - a)).norm() == 0.0)
        throw DegenerateGeometryError("zero-area boundary triangle");
      for (int i = 0; i < 3; ++i) {
        int u = f[i], v = f[(i + 1) % 3];
        ++edge_count[{std::min(u, v), std::max(u, v)}];
      }
    }
    for (const auto& [e, n] : edge_count)
      if (n != 2) throw TopologyError("boundary not watertight: edge shared by " + std::to_string(n));
  }
}

// ---------------------------------------------------------------------------
// PCA
// ---------------------------------------------------------------------------

template <int DIM>
PCABasis<DIM> compute_boundary_pca(const std::vector<Eigen::Matrix<double, DIM, 1>>& points) {
  if (static_cast<int>(points.size()) < DIM + 1)
    throw DegenerateGeometryError("too few points for a PCA basis");
  using Point = Eigen::Matrix<double, DIM, 1>;
  Point mean = Point::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  Eigen::MatrixXd X(points.size(), DIM);
  for (size_t i = 0; i < points.size(); ++i) X.row(i) = (points[i] - mean).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinV);

  PCABasis<DIM> basis;
  basis.mean = mean;
  for (int k = 0; k < DIM; ++k) {
    basis.axes[k] = svd.matrixV().col(k).normalized();
    basis.singular_values[k] = svd.singularValues()[k];
  }
  if (basis.singular_values[0] <= 0.0)
    throw DegenerateGeometryError("coincident point cloud has no principal axes");
  return basis;
}

template <int DIM>
PCABasis<DIM> fixed_axis_basis(const std::vector<Eigen::Matrix<double, DIM, 1>>& points) {
  using Point = Eigen::Matrix<double, DIM, 1>;
  PCABasis<DIM> basis;
  basis.mean = Point::Zero();
  for (const auto& p : points) basis.mean += p;
  basis.mean /= static_cast<double>(points.size());
  for (int k = 0; k < DIM; ++k) {
    basis.axes[k] = Point::Unit(k);
    basis.singular_values[k] = 0;
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Index
// ---------------------------------------------------------------------------

template <int DIM>
bool ClassifierIndex<DIM>::obb_contains(const Point& p) const {
  for (int k = 0; k < DIM; ++k) {
    const double c = (p - basis.mean).dot(basis.axes[k]);
    if (c < lo[k] || c > hi[k]) return false;
  }
  return true;
}

template <int DIM>
double ClassifierIndex<DIM>::obb_diameter() const {
  double d2 = 0;
  for (int k = 0; k < DIM; ++k) d2 += (hi[k] - lo[k]) * (hi[k] - lo[k]);
  return std::sqrt(d2);
}

template <int DIM>
typename ClassifierIndex<DIM>::Point ClassifierIndex<DIM>::obb_center() const {
  Point c = basis.mean;
  for (int k = 0; k < DIM; ++k) c += 0.5 * (lo[k] + hi[k]) * basis.axes[k];
  return c;
}

namespace {

// Coordinates in the plane orthogonal to the ray axis (the remaining
// DIM-1 basis axes).
template <int DIM>
Eigen::Matrix<double, DIM == 2 ? 1 : 2, 1> project_off_axis(
    const PCABasis<DIM>& basis, const Eigen::Matrix<double, DIM, 1>& p) {
  Eigen::Matrix<double, DIM == 2 ? 1 : 2, 1> out;
  for (int k = 0; k < DIM - 1; ++k) out[k] = (p - basis.mean).dot(basis.axes[k]);
  return out;
}

}  // namespace

template <int DIM>
ClassifierIndex<DIM> build_classifier_index(const PCABasis<DIM>& basis,
                                            const BoundaryRep<DIM>& boundary) {
  using Point = Eigen::Matrix<double, DIM, 1>;
  ClassifierIndex<DIM> index;
  index.basis = basis;
  for (int k = 0; k < DIM; ++k) {
    index.lo[k] = std::numeric_limits<double>::infinity();
    index.hi[k] = -std::numeric_limits<double>::infinity();
  }
  const Point& r = basis.axes[DIM - 1];

  std::vector<Eigen::Matrix<double, DIM == 2 ? 1 : 2, 1>> projected;
  projected.reserve(boundary.facets.size());
  for (int f = 0; f < boundary.num_facets(); ++f) {
    projected.push_back(project_off_axis<DIM>(basis, boundary.facet_centroid(f)));

    Point bb_lo = boundary.vertices[boundary.facets[f][0]];
    Point bb_hi = bb_lo;
    for (int i = 0; i < DIM; ++i) {
      const Point& x = boundary.vertices[boundary.facets[f][i]];
      bb_lo = bb_lo.cwiseMin(x);
      bb_hi = bb_hi.cwiseMax(x);
      for (int k = 0; k < DIM; ++k) {
        const double c = (x - basis.mean).dot(basis.axes[k]);
        index.lo[k] = std::min(index.lo[k], c);
        index.hi[k] = std::max(index.hi[k], c);
      }
    }
    const Point diag = bb_hi - bb_lo;
    const Point proj_diag = diag - diag.dot(r) * r;
    index.l_max_projected = std::max(index.l_max_projected, proj_diag.norm());
  }

  const double diam = index.obb_diameter();
  const double expand = 1e-9 * diam;
  for (int k = 0; k < DIM; ++k) {
    index.lo[k] -= expand;
    index.hi[k] += expand;
  }
  index.on_tolerance = 1e-10 * diam;
  index.tree = KdTree<DIM == 2 ? 1 : 2>(std::move(projected));
  return index;
}

// ---------------------------------------------------------------------------
// Rays
// ---------------------------------------------------------------------------

template <int DIM>
Eigen::Matrix<double, DIM, 1> generate_ray_start(const Eigen::Matrix<double, DIM, 1>& p,
                                                 bool inverted, int axis_index,
                                                 const ClassifierIndex<DIM>& index) {
  using Point = Eigen::Matrix<double, DIM, 1>;
  constexpr double kSafeFactor = 1.1;
  const Point& axis = index.basis.axes[axis_index];
  const double axis_length = index.hi[axis_index] - index.lo[axis_index];
  if (axis_length <= 0.0) throw DegenerateGeometryError("zero OBB axis length");
  const double half = 0.5 * axis_length;

  const double p_along = (p - index.basis.mean).dot(axis) - index.lo[axis_index];

  Point min_corner = index.basis.mean, max_corner = index.basis.mean;
  for (int k = 0; k < DIM; ++k) {
    min_corner += index.lo[k] * index.basis.axes[k];
    max_corner += index.hi[k] * index.basis.axes[k];
  }

  Point corner;
  double multiplier;
  if (p_along < half) {
    corner = inverted ? max_corner : min_corner;
    multiplier = inverted ? -1.0 : 1.0;
  } else {
    corner = inverted ? min_corner : max_corner;
    multiplier = inverted ? 1.0 : -1.0;
  }

  const Point proj_point = p - ((p - corner).dot(axis)) * axis;
  return proj_point - kSafeFactor * axis_length * multiplier * axis;
}

template <int DIM>
bool ray_region_fast_reject(const Eigen::Matrix<double, DIM, 1>& origin,
                            const Eigen::Matrix<double, DIM, 1>& dir,
                            const Eigen::Matrix<double, DIM, 1>& center, double radius) {
  using Point = Eigen::Matrix<double, DIM, 1>;
  const Point tip = origin + dir;
  const Point lo = origin.cwiseMin(tip).array() - radius;
  const Point hi = origin.cwiseMax(tip).array() + radius;
  for (int k = 0; k < DIM; ++k)
    if (center[k] < lo[k] || center[k] > hi[k]) return true;
  const double d2 = dir.squaredNorm();
  if (d2 == 0) return false;
  const Point pb = origin + ((center - origin).dot(dir) / d2) * dir;
  return (pb - center).norm() > radius;
}

template <int DIM>
std::vector<int> collect_candidates(const Eigen::Matrix<double, DIM, 1>& q,
                                    const ClassifierIndex<DIM>& index) {
  return index.tree.radius_search(project_off_axis<DIM>(index.basis, q),
                                  index.l_max_projected);
}

namespace {

double point_to_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                        const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

double point_to_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                         const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  // project onto the plane, then clamp to the closest edge if outside
  const Eigen::Vector3d n = (b - a).cross(c - a);
  const double n2 = n.squaredNorm();
  if (n2 == 0) return (p - a).norm();
  const Eigen::Vector3d q = p - n * ((p - a).dot(n) / n2);
  // barycentric test
  const Eigen::Vector3d v0 = b - a, v1 = c - a, v2 = q - a;
  const double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
  const double d20 = v2.dot(v0), d21 = v2.dot(v1);
  const double denom = d00 * d11 - d01 * d01;
  const double v = (d11 * d20 - d01 * d21) / denom;
  const double w = (d00 * d21 - d01 * d20) / denom;
  if (v >= 0 && w >= 0 && v + w <= 1) return (p - q).norm();
  auto edge = [&p](const Eigen::Vector3d& s, const Eigen::Vector3d& e) {
    const Eigen::Vector3d d = e - s;
    const double t = std::clamp((p - s).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return (p - (s + t * d)).norm();
  };
  return std::min({edge(a, b), edge(b, c), edge(c, a)});
}

template <int DIM>
double point_to_facet(const Eigen::Matrix<double, DIM, 1>& p, const BoundaryRep<DIM>& b, int f) {
  if constexpr (DIM == 2)
    return point_to_segment(p, b.vertices[b.facets[f][0]], b.vertices[b.facets[f][1]]);
  else
    return point_to_triangle(p, b.vertices[b.facets[f][0]], b.vertices[b.facets[f][1]],
                             b.vertices[b.facets[f][2]]);
}

// Half-open crossing test for the segment [o, o+dir*t_end] against a 2D
// boundary segment. A crossing exactly at a shared vertex is attributed to
// exactly one of the two incident segments.
bool segment_crosses(const Eigen::Vector2d& o, const Eigen::Vector2d& dir_unit, double t_end,
                     const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d m(-dir_unit.y(), dir_unit.x());
  const double sa = (a - o).dot(m);
  const double sb = (b - o).dot(m);
  const bool crosses = (sa <= 0.0 && sb > 0.0) || (sb <= 0.0 && sa > 0.0);
  if (!crosses) return false;
  const double lambda = sa / (sa - sb);
  const double t = ((a + lambda * (b - a)) - o).dot(dir_unit);
  return t > 0.0 && t <= t_end;
}

// Watertight-style crossing test for a triangle: the projected point-in-
// triangle test uses a rasterization fill rule so shared edges and vertices
// are counted exactly once across a closed, consistently wound surface.
bool triangle_crosses(const Eigen::Vector3d& o, const Eigen::Vector3d& dir_unit, double t_end,
                      const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                      const Eigen::Vector3d& v2) {
  // orthonormal frame perpendicular to the ray
  Eigen::Vector3d m1 = dir_unit.unitOrthogonal();
  Eigen::Vector3d m2 = dir_unit.cross(m1);

  Eigen::Vector2d q0((v0 - o).dot(m1), (v0 - o).dot(m2));
  Eigen::Vector2d q1((v1 - o).dot(m1), (v1 - o).dot(m2));
  Eigen::Vector2d q2((v2 - o).dot(m1), (v2 - o).dot(m2));

  const double e0 = q0.x() * q1.y() - q1.x() * q0.y();
  const double e1 = q1.x() * q2.y() - q2.x() * q1.y();
  const double e2 = q2.x() * q0.y() - q0.x() * q2.y();

  const bool any_pos = e0 > 0 || e1 > 0 || e2 > 0;
  const bool any_neg = e0 < 0 || e1 < 0 || e2 < 0;
  if (any_pos && any_neg) return false;
  if (!any_pos && !any_neg) return false;  // degenerate projection

  // top-left fill rule for edges passing exactly through the origin
  const double flip = any_pos ? 1.0 : -1.0;
  auto edge_owned = [flip](double e, const Eigen::Vector2d& s, const Eigen::Vector2d& t) {
    if (e != 0.0) return true;
    const Eigen::Vector2d d = flip * (t - s);
    return d.y() < 0.0 || (d.y() == 0.0 && d.x() < 0.0);
  };
  if (!edge_owned(e0, q0, q1) || !edge_owned(e1, q1, q2) || !edge_owned(e2, q2, q0))
    return false;

  const Eigen::Vector3d n = (v1 - v0).cross(v2 - v0);
  const double denom = dir_unit.dot(n);
  if (denom == 0.0) return false;
  const double t = (v0 - o).dot(n) / denom;
  return t > 0.0 && t <= t_end;
}

template <int DIM>
bool facet_crossed(const Eigen::Matrix<double, DIM, 1>& o,
                   const Eigen::Matrix<double, DIM, 1>& dir_unit, double t_end,
                   const BoundaryRep<DIM>& b, int f) {
  if constexpr (DIM == 2)
    return segment_crosses(o, dir_unit, t_end, b.vertices[b.facets[f][0]],
                           b.vertices[b.facets[f][1]]);
  else
    return triangle_crosses(o, dir_unit, t_end, b.vertices[b.facets[f][0]],
                            b.vertices[b.facets[f][1]], b.vertices[b.facets[f][2]]);
}

template <int DIM>
double boundary_diameter(const BoundaryRep<DIM>& b) {
  using Point = Eigen::Matrix<double, DIM, 1>;
  Point lo = b.vertices[0], hi = b.vertices[0];
  for (const auto& v : b.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

}  // namespace

template <int DIM>
TraceResult trace_ray(const Eigen::Matrix<double, DIM, 1>& start,
                      const Eigen::Matrix<double, DIM, 1>& end,
                      const BoundaryRep<DIM>& boundary, const ClassifierIndex<DIM>* index,
                      ClassifyStats* stats) {
  using Point = Eigen::Matrix<double, DIM, 1>;
  const Point seg = end - start;
  const double t_end = seg.norm();
  if (t_end == 0.0) throw InvalidInputError("trace_ray: start equals end");
  const Point dir = seg / t_end;
  const double on_tol = index ? index->on_tolerance : 1e-10 * boundary_diameter(boundary);

  std::vector<int> candidate_ids;
  if (index) {
    candidate_ids = collect_candidates(start, *index);
  } else {
    candidate_ids.resize(boundary.num_facets());
    std::iota(candidate_ids.begin(), candidate_ids.end(), 0);
  }

  long count = 0;
  for (int f : candidate_ids) {
    const auto [c, r] = boundary.facet_ball(f);
    if (ray_region_fast_reject<DIM>(start, seg, c, r)) continue;
    if (stats) ++stats->facet_tests;
    if (point_to_facet<DIM>(end, boundary, f) < on_tol) return {Sideness::On, count};
    if (facet_crossed<DIM>(start, dir, t_end, boundary, f)) ++count;
  }
  if (stats) ++stats->rays_cast;
  return {count % 2 == 1 ? Sideness::In : Sideness::Out, count};
}

template <int DIM>
Sideness classify_point(const Eigen::Matrix<double, DIM, 1>& p, const BoundaryRep<DIM>& boundary,
                        const ClassifierIndex<DIM>& index, ClassifyStats* stats) {
  if (!index.obb_contains(p)) return Sideness::Out;

  std::vector<long> counts;

  // opposed ray pair along the minimum-variance axis, index-accelerated
  std::array<long, 2> primary{};
  for (int i = 0; i < 2; ++i) {
    const auto start = generate_ray_start<DIM>(p, i == 1, DIM - 1, index);
    const TraceResult res = trace_ray<DIM>(start, p, boundary, &index, stats);
    if (res.sideness == Sideness::On) return Sideness::On;
    if (res.count == 0) return Sideness::Out;
    primary[i] = res.count;
    counts.push_back(res.count);
  }
  if (primary[0] % 2 == primary[1] % 2)
    return primary[0] % 2 == 1 ? Sideness::In : Sideness::Out;

  // fallback pairs along the remaining axes, full scan
  for (int axis = 0; axis < DIM - 1; ++axis) {
    for (int i = 0; i < 2; ++i) {
      const auto start = generate_ray_start<DIM>(p, i == 1, axis, index);
      const TraceResult res = trace_ray<DIM>(start, p, boundary, nullptr, stats);
      if (res.sideness == Sideness::On) return Sideness::On;
      if (res.count == 0) return Sideness::Out;
      counts.push_back(res.count);
    }
  }
  throw InconsistentClassificationError("inconsistent ray parities while classifying point",
                                        counts);
}

namespace {

// Strict crossing test used by the oracle: reports a degenerate hit when the
// crossing grazes a vertex or runs parallel, so the caller can retry with a
// perturbed direction.
enum class StrictHit { Miss, Hit, Degenerate };

StrictHit strict_segment_hit(const Eigen::Vector2d& o, const Eigen::Vector2d& dir_unit,
                             double t_end, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                             double eps) {
  const Eigen::Vector2d m(-dir_unit.y(), dir_unit.x());
  const double sa = (a - o).dot(m);
  const double sb = (b - o).dot(m);
  if (std::abs(sa) < eps || std::abs(sb) < eps) {
    // endpoint close to the ray line: degenerate only if the crossing could
    // be near the counted range
    return StrictHit::Degenerate;
  }
  if ((sa > 0) == (sb > 0)) return StrictHit::Miss;
  const double lambda = sa / (sa - sb);
  const double t = ((a + lambda * (b - a)) - o).dot(dir_unit);
  if (std::abs(t) < eps || std::abs(t - t_end) < eps) return StrictHit::Degenerate;
  return (t > 0 && t < t_end) ? StrictHit::Hit : StrictHit::Miss;
}

StrictHit strict_triangle_hit(const Eigen::Vector3d& o, const Eigen::Vector3d& dir_unit,
                              double t_end, const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                              const Eigen::Vector3d& v2, double eps) {
  const Eigen::Vector3d e1 = v1 - v0, e2 = v2 - v0;
  const Eigen::Vector3d pv = dir_unit.cross(e2);
  const double det = e1.dot(pv);
  const double scale = e1.norm() * e2.norm();
  if (std::abs(det) < eps * scale) return StrictHit::Degenerate;
  const double inv = 1.0 / det;
  const Eigen::Vector3d tv = o - v0;
  const double u = tv.dot(pv) * inv;
  const Eigen::Vector3d qv = tv.cross(e1);
  const double v = dir_unit.dot(qv) * inv;
  const double bary_eps = 1e-10;
  if (u < -bary_eps || v < -bary_eps || u + v > 1 + bary_eps) return StrictHit::Miss;
  if (u < bary_eps || v < bary_eps || u + v > 1 - bary_eps) return StrictHit::Degenerate;
  const double t = e2.dot(qv) * inv;
  if (std::abs(t) < eps || std::abs(t - t_end) < eps) return StrictHit::Degenerate;
  return (t > 0 && t < t_end) ? StrictHit::Hit : StrictHit::Miss;
}

template <int DIM>
Eigen::Matrix<double, DIM, 1> perturbed_direction(int attempt) {
  if constexpr (DIM == 2) {
    const double angle = 0.5 * M_PI + attempt * 0.3819660112501051;  // golden-section steps
    return {std::cos(angle), std::sin(angle)};
  } else {
    const double a = attempt * 0.3819660112501051;
    const double b = attempt * 0.6180339887498949;
    return Eigen::Vector3d(std::sin(a) * 0.3, std::sin(b) * 0.3, 1.0).normalized();
  }
}

}  // namespace

template <int DIM>
Sideness classify_brute_force(const Eigen::Matrix<double, DIM, 1>& p,
                              const BoundaryRep<DIM>& boundary, ClassifyStats* stats) {
  const double diam = boundary_diameter(boundary);
  const double on_tol = 1e-10 * diam;
  for (int f = 0; f < boundary.num_facets(); ++f)
    if (point_to_facet<DIM>(p, boundary, f) < on_tol) return Sideness::On;

  const double eps = 1e-12 * diam;
  for (int attempt = 0; attempt < 32; ++attempt) {
    const auto dir = perturbed_direction<DIM>(attempt);
    const double t_end = 2.5 * diam;
    long count = 0;
    bool degenerate = false;
    for (int f = 0; f < boundary.num_facets(); ++f) {
      if (stats) ++stats->facet_tests;
      StrictHit hit;
      if constexpr (DIM == 2)
        hit = strict_segment_hit(p, dir, t_end, boundary.vertices[boundary.facets[f][0]],
                                 boundary.vertices[boundary.facets[f][1]], eps);
      else
        hit = strict_triangle_hit(p, dir, t_end, boundary.vertices[boundary.facets[f][0]],
                                  boundary.vertices[boundary.facets[f][1]],
                                  boundary.vertices[boundary.facets[f][2]], eps);
      if (hit == StrictHit::Degenerate) {
        degenerate = true;
        break;
      }
      if (hit == StrictHit::Hit) ++count;
    }
    if (degenerate) continue;
    if (stats) ++stats->rays_cast;
    return count % 2 == 1 ? Sideness::In : Sideness::Out;
  }
  throw DegenerateGeometryError("brute-force ray degenerate in every tried direction");
}

// ---------------------------------------------------------------------------
// Benchmark
// ---------------------------------------------------------------------------

std::vector<BenchRow> benchmark_classification(
    const std::vector<int>& boundary_sizes,
    const std::function<BoundaryRep2(int)>& make_boundary,
    const std::vector<Eigen::Vector2d>& queries, int runs) {
  using Clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  for (int n : boundary_sizes) {
    const BoundaryRep2 boundary = make_boundary(n);
    double t_pca = 0, t_brute = 0;
    volatile long sink = 0;
    for (int run = 0; run < runs; ++run) {
      auto t0 = Clock::now();
      const auto basis = compute_boundary_pca<2>(boundary.vertices);
      const auto index = build_classifier_index<2>(basis, boundary);
      long acc = 0;
      for (const auto& q : queries) acc += static_cast<long>(classify_point<2>(q, boundary, index));
      auto t1 = Clock::now();
      sink += acc;
      t_pca += std::chrono::duration<double>(t1 - t0).count();

      t0 = Clock::now();
      acc = 0;
      for (const auto& q : queries) acc += static_cast<long>(classify_brute_force<2>(q, boundary));
      t1 = Clock::now();
      sink += acc;
      t_brute += std::chrono::duration<double>(t1 - t0).count();
    }
    BenchRow row;
    row.n_facets = n;
    row.runtime_pca = t_pca / runs;
    row.runtime_brute = t_brute / runs;
    row.speedup = row.runtime_brute / row.runtime_pca;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Boundary factories and IO
// ---------------------------------------------------------------------------

BoundaryRep2 make_regular_polygon(int n, const Eigen::Vector2d& center, double radius) {
  BoundaryRep2 b;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    b.vertices.emplace_back(center.x() + radius * std::cos(a),
                            center.y() + radius * std::sin(a));
  }
  for (int i = 0; i < n; ++i) b.facets.push_back({i, (i + 1) % n});
  b.validate();
  return b;
}

BoundaryRep2 make_airfoil(int n_segments) {
  // NACA 0012 thickness distribution with a closed trailing edge
  auto half_thickness = [](double x) {
    return 5.0 * 0.12 *
           (0.2969 * std::sqrt(x) - 0.1260 * x - 0.3516 * x * x + 0.2843 * x * x * x -
            0.1036 * x * x * x * x);
  };
  const int per_side = n_segments / 2;
  std::vector<Eigen::Vector2d> loop;
  // upper surface from trailing edge to leading edge, cosine clustering
  for (int i = 0; i <= per_side; ++i) {
    const double s = static_cast<double>(i) / per_side;
    const double x = 0.5 * (1.0 + std::cos(M_PI * s));
    if (i == per_side)
      loop.emplace_back(0.0, 0.0);
    else
      loop.emplace_back(x, half_thickness(x));
  }
  // lower surface back to the trailing edge (skip shared LE / TE points)
  for (int i = 1; i < per_side; ++i) {
    const double s = static_cast<double>(i) / per_side;
    const double x = 0.5 * (1.0 - std::cos(M_PI * s));
    loop.emplace_back(x, -half_thickness(x));
  }
  return make_polygon_boundary(loop);
}

BoundaryRep2 make_polygon_boundary(const std::vector<Eigen::Vector2d>& loop) {
  BoundaryRep2 b;
  b.vertices = loop;
  const int n = static_cast<int>(loop.size());
  for (int i = 0; i < n; ++i) b.facets.push_back({i, (i + 1) % n});
  b.validate();
  return b;
}

BoundaryRep2 rotate_boundary(const BoundaryRep2& b, double angle, const Eigen::Vector2d& pivot) {
  BoundaryRep2 out = b;
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& v : out.vertices) {
    const Eigen::Vector2d d = v - pivot;
    v = pivot + Eigen::Vector2d(c * d.x() - s * d.y(), s * d.x() + c * d.y());
  }
  return out;
}

BoundaryRep3 make_box_boundary(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  BoundaryRep3 b;
  for (int i = 0; i < 8; ++i)
    b.vertices.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(),
                            i & 4 ? hi.z() : lo.z());
  // two triangles per face, outward-consistent winding
  const int faces[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& f : faces) {
    b.facets.push_back({f[0], f[1], f[2]});
    b.facets.push_back({f[0], f[2], f[3]});
  }
  b.validate();
  return b;
}

template <int DIM>
void write_boundary(const BoundaryRep<DIM>& b, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "boundary dim " << DIM << " vertices " << b.vertices.size() << " facets "
      << b.facets.size() << '\n';
  for (const auto& v : b.vertices) {
    for (int k = 0; k < DIM; ++k) out << (k ? " " : "") << fmt_double(v[k]);
    out << '\n';
  }
  for (const auto& f : b.facets) {
    for (int k = 0; k < DIM; ++k) out << (k ? " " : "") << f[k];
    out << '\n';
  }
}

BoundaryRep2 read_boundary2(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string kw, kwd, kwv, kwf;
  int dim = 0, nv = 0, nf = 0;
  in >> kw >> kwd >> dim >> kwv >> nv >> kwf >> nf;
  if (kw != "boundary" || dim != 2) throw IoError("bad boundary header in " + path);
  BoundaryRep2 b;
  b.vertices.resize(nv);
  for (int i = 0; i < nv; ++i) in >> b.vertices[i].x() >> b.vertices[i].y();
  b.facets.resize(nf);
  for (int i = 0; i < nf; ++i) in >> b.facets[i][0] >> b.facets[i][1];
  if (!in) throw IoError("truncated boundary file: " + path);
  b.validate();
  return b;
}

// explicit instantiations
template struct BoundaryRep<2>;
template struct BoundaryRep<3>;
template struct ClassifierIndex<2>;
template struct ClassifierIndex<3>;
template PCABasis<2> compute_boundary_pca<2>(const std::vector<Eigen::Vector2d>&);
template PCABasis<3> compute_boundary_pca<3>(const std::vector<Eigen::Vector3d>&);
template PCABasis<2> fixed_axis_basis<2>(const std::vector<Eigen::Vector2d>&);
template PCABasis<3> fixed_axis_basis<3>(const std::vector<Eigen::Vector3d>&);
template ClassifierIndex<2> build_classifier_index<2>(const PCABasis<2>&, const BoundaryRep<2>&);
template ClassifierIndex<3> build_classifier_index<3>(const PCABasis<3>&, const BoundaryRep<3>&);
template Eigen::Vector2d generate_ray_start<2>(const Eigen::Vector2d&, bool, int,
                                               const ClassifierIndex<2>&);
template Eigen::Vector3d generate_ray_start<3>(const Eigen::Vector3d&, bool, int,
                                               const ClassifierIndex<3>&);
template bool ray_region_fast_reject<2>(const Eigen::Vector2d&, const Eigen::Vector2d&,
                                        const Eigen::Vector2d&, double);
template bool ray_region_fast_reject<3>(const Eigen::Vector3d&, const Eigen::Vector3d&,
                                        const Eigen::Vector3d&, double);
template std::vector<int> collect_candidates<2>(const Eigen::Vector2d&,
                                                const ClassifierIndex<2>&);
template std::vector<int> collect_candidates<3>(const Eigen::Vector3d&,
                                                const ClassifierIndex<3>&);
template TraceResult trace_ray<2>(const Eigen::Vector2d&, const Eigen::Vector2d&,
                                  const BoundaryRep<2>&, const ClassifierIndex<2>*,
                                  ClassifyStats*);
template TraceResult trace_ray<3>(const Eigen::Vector3d&, const Eigen::Vector3d&,
                                  const BoundaryRep<3>&, const ClassifierIndex<3>*,
                                  ClassifyStats*);
template Sideness classify_point<2>(const Eigen::Vector2d&, const BoundaryRep<2>&,
                                    const ClassifierIndex<2>&, ClassifyStats*);
template Sideness classify_point<3>(const Eigen::Vector3d&, const BoundaryRep<3>&,
                                    const ClassifierIndex<3>&, ClassifyStats*);
template Sideness classify_brute_force<2>(const Eigen::Vector2d&, const BoundaryRep<2>&,
                                          ClassifyStats*);
template Sideness classify_brute_force<3>(const Eigen::Vector3d&, const BoundaryRep<3>&,
                                          ClassifyStats*);
template void write_boundary<2>(const BoundaryRep<2>&, const std::string&);
template void write_boundary<3>(const BoundaryRep<3>&, const std::string&);

}  // namespace sczm
