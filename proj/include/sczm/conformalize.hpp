#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sczm/grains.hpp"
#include "sczm/kdtree.hpp"
#include "sczm/mesh.hpp"

namespace sczm {

/// Interface-fitted mesh produced by conformalization. Node markers record
/// provenance: 0 = inherited from a source node, 1 = new node inside its own
/// block, 2 = new node outside its block's source region.
struct IFMMesh {
  Mesh mesh;                         // block id stored as region_id
  std::vector<int> node_marker;      // 0 | 1 | 2
  std::vector<int> source_node_id;   // valid where marker == 0, else -1
  double dropped_sliver_area = 0;
};

/// Partial mesh surgery: elements untouched by the grain boundaries are
/// copied verbatim; intersected elements are clipped against each grain and
/// fan-triangulated. Coincident nodes merge within a block and stay
/// duplicated across blocks.
IFMMesh conformalize(const Mesh& mesh, const GrainSet& grains);

struct SearchStructure {
  KdTree<2> centroid_tree;
  bool is_uniform = false;
  // direct lookup for structured uniform quad meshes
  Rect bounds{};
  int nx = 0, ny = 0;
  std::vector<int> lookup;  // cell -> element id

  std::optional<int> direct_lookup(const Vec2& x) const;
};

SearchStructure build_search_structure(const Mesh& mesh);

/// Containing source element of block `block`, or nullopt. Fast path via the
/// uniform lookup, fallback via nearest centroids plus exact containment.
std::optional<int> find_source_elem(const Vec2& x, int block, const SearchStructure& s,
                                    const Mesh& mesh);

/// Marker 0 nodes copy their source value; marker 1 interpolates inside a
/// containing same-block element; marker 2 (or no containing element)
/// recovers by first-order expansion around the closest node of the closest
/// same-block element.
NodalField project_solution(const IFMMesh& ifm, const Mesh& source, const NodalField& u);

/// Seam facet pairs of an IFM mesh: geometrically coincident boundary edges
/// of different blocks, matched exactly.
std::vector<SeamFacet> extract_ifm_seams(const IFMMesh& ifm);

void write_ifm(const IFMMesh& ifm, const std::string& path);
IFMMesh read_ifm(const std::string& path);

}  // namespace sczm
