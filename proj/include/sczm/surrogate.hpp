#pragma once

#include <optional>
#include <vector>

#include "sczm/grains.hpp"
#include "sczm/kdtree.hpp"
#include "sczm/mesh.hpp"

namespace sczm {

/// Fraction of the element polygon covered by the grain, by polygon clipping.
double clip_element_fraction(const Polygon& element, const Grain& grain);

/// Dominant-volume assignment: each element receives the grain occupying the
/// largest fraction of its area. Elements whose nodes all classify inside one
/// grain take the shortcut path.
std::vector<int> assign_grain_ids(const Mesh& mesh, const GrainSet& grains);

/// Closest-point queries against the true interface polyline.
class InterfaceLocator {
 public:
  explicit InterfaceLocator(std::vector<InterfaceSegment> segments);

  /// Distance vector from q to its closest-point projection and the normal
  /// of the nearest segment. The nearest segment is found among the k=8
  /// nearest centroids by exact distance.
  std::pair<Vec2, Vec2> closest_point(const Vec2& q) const;

  const std::vector<InterfaceSegment>& segments() const { return segments_; }

 private:
  std::vector<InterfaceSegment> segments_;
  KdTree<2> centroid_tree_;
};

struct InterfaceQp {
  Vec2 x;            // quadrature point on the facet
  double weight;     // facet length x gauss weight
  Vec2 normal;       // true interface normal, oriented so normal . n_h >= 0
  Vec2 d;            // surrogate point -> closest true-interface point
  double area_factor;  // |n . n_h|
  Vec2 tau_h;        // n_h - (n_h . n) n
};

struct SurrogateFacet {
  int minus_element, plus_element;
  Vec2 p0, p1;
  Vec2 n_h;  // facet normal, minus -> plus
  std::vector<InterfaceQp> qps;
};

struct SurrogateInterface {
  std::vector<SurrogateFacet> facets;
  bool empty() const { return facets.empty(); }
  int num_qps() const;
};

/// Interface facets are the interior facets separating different region ids;
/// per-quadrature-point distance vectors and true normals come from the
/// locator. Passing no locator yields the fitted degeneracy (d = 0,
/// area factor 1).
SurrogateInterface build_surrogate_interface(const Mesh& mesh,
                                             const std::vector<Facet>& interior,
                                             const InterfaceLocator* locator);

/// Convenience wrapper: assigns regions, extracts inter-region facets and
/// fills the geometric data from the grain set's shared interface.
SurrogateInterface build_surrogate_interface(const Mesh& mesh, const GrainSet& grains,
                                             const std::vector<int>& region_ids);

}  // namespace sczm
