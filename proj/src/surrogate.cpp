#include "sczm/surrogate.hpp"

#include <cmath>
#include <iostream>

#include "sczm/errors.hpp"
#include "sczm/fem.hpp"

namespace sczm {

double clip_element_fraction(const Polygon& element, const Grain& grain) {
  const double ea = polygon_area(element);
  if (ea <= 0) throw DegenerateGeometryError("element polygon is not simple counter-clockwise");
  const Polygon piece = clip_convex(element, grain.polygon);
  if (piece.size() < 3) return 0.0;
  return std::clamp(polygon_area(piece) / ea, 0.0, 1.0);
}

namespace {

Polygon element_polygon(const Mesh& mesh, int e) {
  Polygon p;
  const Element& el = mesh.elements[e];
  for (int i = 0; i < el.n(); ++i) p.push_back(mesh.nodes[el.nodes[i]]);
  return p;
}

}  // namespace

std::vector<int> assign_grain_ids(const Mesh& mesh, const GrainSet& grains) {
  grains.validate();

  // classifier per grain for the all-nodes-inside shortcut
  std::vector<BoundaryRep2> reps;
  std::vector<ClassifierIndex<2>> indices;
  for (const Grain& g : grains.grains) {
    reps.push_back(make_polygon_boundary(g.polygon));
    indices.push_back(build_classifier_index<2>(compute_boundary_pca<2>(reps.back().vertices),
                                                reps.back()));
  }

  std::vector<int> region(mesh.num_elements(), -1);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Element& el = mesh.elements[e];
    double best_fraction = 0;
    int best_grain = -1;
    for (size_t gi = 0; gi < grains.grains.size(); ++gi) {
      bool all_inside = true;
      for (int i = 0; i < el.n() && all_inside; ++i)
        all_inside = classify_point<2>(mesh.nodes[el.nodes[i]], reps[gi], indices[gi]) ==
                     Sideness::In;
      if (all_inside) {
        best_grain = grains.grains[gi].id;
        best_fraction = 1.0;
        break;
      }
      const double f = clip_element_fraction(element_polygon(mesh, e), grains.grains[gi]);
      if (f > best_fraction) {
        best_fraction = f;
        best_grain = grains.grains[gi].id;
      }
    }
    if (best_grain < 0 || best_fraction <= 0)
      throw CoverageError("element " + std::to_string(e) + " lies in no grain");
    region[e] = best_grain;
  }
  return region;
}

InterfaceLocator::InterfaceLocator(std::vector<InterfaceSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw InvalidInputError("empty interface");
  std::vector<Vec2> centroids;
  centroids.reserve(segments_.size());
  for (const auto& s : segments_) centroids.push_back(0.5 * (s.a + s.b));
  centroid_tree_ = KdTree<2>(std::move(centroids));
}

std::pair<Vec2, Vec2> InterfaceLocator::closest_point(const Vec2& q) const {
  // centroid distance alone can misorder long segments; refine among the
  // nearest k by exact point-to-segment distance
  const int k = std::min<int>(8, static_cast<int>(segments_.size()));
  const std::vector<int> cand = centroid_tree_.nearest(q, k);
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_proj = Vec2::Zero(), best_normal = Vec2::UnitX();
  for (int i : cand) {
    const InterfaceSegment& s = segments_[i];
    const Vec2 ab = s.b - s.a;
    const double t = std::clamp((q - s.a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const Vec2 proj = s.a + t * ab;
    const double dist = (q - proj).norm();
    if (dist < best) {
      best = dist;
      best_proj = proj;
      best_normal = s.normal;
    }
  }
  return {best_proj - q, best_normal};
}

int SurrogateInterface::num_qps() const {
  int n = 0;
  for (const auto& f : facets) n += static_cast<int>(f.qps.size());
  return n;
}

SurrogateInterface build_surrogate_interface(const Mesh& mesh,
                                             const std::vector<Facet>& interior,
                                             const InterfaceLocator* locator) {
  SurrogateInterface si;
  for (const Facet& f : interior) {
    if (mesh.region_id[f.minus_element] == mesh.region_id[f.plus_element]) continue;
    SurrogateFacet sf;
    sf.minus_element = f.minus_element;
    sf.plus_element = f.plus_element;
    sf.p0 = mesh.nodes[f.n0];
    sf.p1 = mesh.nodes[f.n1];
    sf.n_h = f.normal;
    for (const FacetQuadPoint& q : facet_quadrature(sf.p0, sf.p1)) {
      InterfaceQp qp;
      qp.x = sf.p0 + q.s * (sf.p1 - sf.p0);
      qp.weight = q.weight;
      if (locator) {
        auto [d, n] = locator->closest_point(qp.x);
        if (n.dot(sf.n_h) < 0) n = -n;
        qp.d = d;
        qp.normal = n;
      } else {
        qp.d = Vec2::Zero();
        qp.normal = sf.n_h;
      }
      qp.area_factor = std::abs(qp.normal.dot(sf.n_h));
      qp.tau_h = sf.n_h - (sf.n_h.dot(qp.normal)) * qp.normal;
      sf.qps.push_back(qp);
    }
    si.facets.push_back(std::move(sf));
  }
  return si;
}

SurrogateInterface build_surrogate_interface(const Mesh& mesh, const GrainSet& grains,
                                             const std::vector<int>& region_ids) {
  Mesh work = mesh;
  work.region_id = region_ids;
  const auto facets = interior_facets(work);
  const auto segs = shared_interface(grains);
  if (segs.empty()) throw InvalidInputError("grain set has no shared interface");
  InterfaceLocator locator(segs);
  SurrogateInterface si = build_surrogate_interface(work, facets, &locator);
  if (si.empty() && grains.grains.size() >= 2)
    std::cerr << "warning: grain assignment produced an empty surrogate interface\n";
  return si;
}

}  // namespace sczm
