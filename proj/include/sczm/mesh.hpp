#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sczm {

using Vec2 = Eigen::Vector2d;

enum class ElemKind { Tri3, Quad4 };

inline int elem_node_count(ElemKind k) { return k == ElemKind::Tri3 ? 3 : 4; }

struct Element {
  ElemKind kind;
  std::array<int, 4> nodes;  // last entry unused for tri3
  int n() const { return elem_node_count(kind); }
};

struct Rect {
  double xmin, ymin, xmax, ymax;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

/// Two-dimensional mesh of tri3/quad4 elements with per-element region ids
/// and named boundary node sets. Immutable once built.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<Element> elements;
  std::vector<int> region_id;                       // one per element
  std::map<std::string, std::vector<int>> boundary_tags;  // name -> node ids

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }

  double element_area(int e) const;
  Vec2 element_centroid(int e) const;
  double total_area() const;

  // Throws if connectivity is out of range or any element is inverted.
  void validate() const;
};

/// Interior facet between two elements. The unit normal points from the
/// minus element toward the plus element; the minus side is the one with
/// the lower region id (lower element id on ties).
struct Facet {
  int n0, n1;         // endpoint node ids
  int minus_element;
  int plus_element;
  Vec2 normal;        // unit, minus -> plus
};

struct NodalField {
  std::string name;
  int components = 2;
  std::vector<double> values;  // node-major: [n0c0, n0c1, n1c0, ...]
};

Mesh build_structured_quad(int nx, int ny, const Rect& bounds);

// Each cell is split into four triangles about its centroid.
Mesh build_crossed_tri(int nx, int ny, const Rect& bounds);

std::vector<Facet> interior_facets(const Mesh& mesh);

double characteristic_size(const Mesh& mesh);

struct Segment2 {
  Vec2 a, b;
};

/// One cohesive facet of a split mesh: the two sides reference their own
/// node copies.  Geometry (endpoints, normal) is shared.
struct SeamFacet {
  Vec2 p0, p1;
  Vec2 normal;  // minus -> plus
  int minus_element, plus_element;
};

struct SplitMesh {
  Mesh mesh;
  std::vector<SeamFacet> seams;
  // For every node of the split mesh, the originating node id of the input
  // mesh (identity for non-duplicated nodes).
  std::vector<int> source_node;
};

/// Duplicates the nodes along a mesh-aligned interface segment, producing a
/// zero-thickness seam.  Elements on the positive side of the line get
/// region id 2, negative side id 1.
SplitMesh split_fitted_interface(const Mesh& mesh, const Segment2& interface);

/// Splits the mesh along the given interior facets: every node incident to
/// elements of more than one region gets one copy per region.
SplitMesh split_along_facets(const Mesh& mesh, const std::vector<Facet>& facets);

/// Element ids reachable from each other through shared nodes.
int count_connected_components(const Mesh& mesh);

void write_mesh(const Mesh& mesh, const std::string& path);
Mesh read_mesh(const std::string& path);

void write_field(const NodalField& field, const std::string& path);
NodalField read_field(const std::string& path);

/// Tags boundary nodes of an axis-aligned rectangular mesh as
/// left/right/bottom/top.  Used after generation and after reading files.
void tag_rectangle_boundaries(Mesh& mesh);

}  // namespace sczm
