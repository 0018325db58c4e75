#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sczm/kdtree.hpp"

namespace sczm {

enum class Sideness { In, Out, On };

std::string to_string(Sideness s);

/// Watertight boundary representation: segments in 2D, triangles in 3D.
template <int DIM>
struct BoundaryRep {
  using Point = Eigen::Matrix<double, DIM, 1>;
  static constexpr int kFacetNodes = DIM;  // 2 in 2D, 3 in 3D

  std::vector<Point> vertices;
  std::vector<std::array<int, DIM>> facets;

  int num_facets() const { return static_cast<int>(facets.size()); }
  Point facet_centroid(int f) const;
  /// Center and radius of the facet's bounding ball.
  std::pair<Point, double> facet_ball(int f) const;

  // Watertightness: even vertex degree (2D) / every edge shared by exactly
  // two triangles (3D); rejects zero-measure facets.
  void validate() const;
};

using BoundaryRep2 = BoundaryRep<2>;
using BoundaryRep3 = BoundaryRep<3>;

template <int DIM>
struct PCABasis {
  using Point = Eigen::Matrix<double, DIM, 1>;
  Point mean;
  std::array<Point, DIM> axes;  // descending variance; axes[DIM-1] is the ray axis
  std::array<double, DIM> singular_values;
};

template <int DIM>
PCABasis<DIM> compute_boundary_pca(const std::vector<Eigen::Matrix<double, DIM, 1>>& points);

/// Basis aligned with the world axes; the ray direction is the last axis.
template <int DIM>
PCABasis<DIM> fixed_axis_basis(const std::vector<Eigen::Matrix<double, DIM, 1>>& points);

/// Acceleration structure: oriented bounding box in the PCA frame, a kd-tree
/// over facet centroids projected onto the plane orthogonal to the ray axis,
/// and the maximum projected facet diagonal used as search radius.
template <int DIM>
struct ClassifierIndex {
  using Point = Eigen::Matrix<double, DIM, 1>;

  PCABasis<DIM> basis;
  std::array<double, DIM> lo{}, hi{};  // OBB intervals in axis coordinates
  double l_max_projected = 0;
  double on_tolerance = 0;  // 1e-10 x OBB diameter
  KdTree<DIM == 2 ? 1 : 2> tree;

  bool obb_contains(const Point& p) const;
  double obb_diameter() const;
  Point obb_center() const;
};

template <int DIM>
ClassifierIndex<DIM> build_classifier_index(const PCABasis<DIM>& basis,
                                            const BoundaryRep<DIM>& boundary);

/// Ray start placed strictly outside the OBB so the segment [start, p]
/// sweeps the whole box along the chosen axis. `inverted` selects the
/// opposite member of the ray pair.
template <int DIM>
Eigen::Matrix<double, DIM, 1> generate_ray_start(const Eigen::Matrix<double, DIM, 1>& p,
                                                 bool inverted, int axis_index,
                                                 const ClassifierIndex<DIM>& index);

/// True only when the segment from `origin` along `dir` provably misses the
/// ball (AABB test, then perpendicular distance to the carrier line).
template <int DIM>
bool ray_region_fast_reject(const Eigen::Matrix<double, DIM, 1>& origin,
                            const Eigen::Matrix<double, DIM, 1>& dir,
                            const Eigen::Matrix<double, DIM, 1>& center, double radius);

template <int DIM>
std::vector<int> collect_candidates(const Eigen::Matrix<double, DIM, 1>& q,
                                    const ClassifierIndex<DIM>& index);

struct ClassifyStats {
  int rays_cast = 0;
  long facet_tests = 0;
};

struct TraceResult {
  Sideness sideness;
  long count = 0;
};

/// Counts crossings of the segment [start, end] with the boundary facets.
/// Returns On when `end` lies within tolerance of a facet, otherwise In/Out
/// by parity.  Vertex hits are counted once via a half-open rule.
template <int DIM>
TraceResult trace_ray(const Eigen::Matrix<double, DIM, 1>& start,
                      const Eigen::Matrix<double, DIM, 1>& end,
                      const BoundaryRep<DIM>& boundary, const ClassifierIndex<DIM>* index,
                      ClassifyStats* stats = nullptr);

/// Multi-ray protocol: OBB reject, an opposed ray pair along the
/// minimum-variance axis, then fallback pairs along the remaining axes.
/// Throws InconsistentClassificationError when every ray intersects but the
/// parities keep disagreeing.
template <int DIM>
Sideness classify_point(const Eigen::Matrix<double, DIM, 1>& p, const BoundaryRep<DIM>& boundary,
                        const ClassifierIndex<DIM>& index, ClassifyStats* stats = nullptr);

/// Full-scan oracle: one fixed-direction ray against all facets; retries with
/// a perturbed direction when the hit is degenerate (vertex/edge grazing).
template <int DIM>
Sideness classify_brute_force(const Eigen::Matrix<double, DIM, 1>& p,
                              const BoundaryRep<DIM>& boundary, ClassifyStats* stats = nullptr);

struct BenchRow {
  int n_facets;
  double runtime_pca;
  double runtime_brute;
  double speedup;
};

/// Times index construction plus classification of all query points for each
/// boundary size; runtimes are averaged over `runs` repetitions.
std::vector<BenchRow> benchmark_classification(
    const std::vector<int>& boundary_sizes,
    const std::function<BoundaryRep2(int)>& make_boundary,
    const std::vector<Eigen::Vector2d>& queries, int runs = 5);

// --- boundary factories used by tests, benchmarks and the CLI ---

BoundaryRep2 make_regular_polygon(int n, const Eigen::Vector2d& center, double radius);
/// Closed NACA0012-style airfoil outline with `n_segments` facets.
BoundaryRep2 make_airfoil(int n_segments);
BoundaryRep2 make_polygon_boundary(const std::vector<Eigen::Vector2d>& loop);
BoundaryRep2 rotate_boundary(const BoundaryRep2& b, double angle, const Eigen::Vector2d& pivot);

BoundaryRep3 make_box_boundary(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi);

template <int DIM>
void write_boundary(const BoundaryRep<DIM>& b, const std::string& path);
BoundaryRep2 read_boundary2(const std::string& path);

}  // namespace sczm
