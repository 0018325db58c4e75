#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "sczm/mesh.hpp"

namespace sczm {

// Reference-element machinery for tri3 and quad4 with full integration:
// 3-point rule on triangles, 2x2 Gauss on quads, 2-point Gauss on facets.

struct QuadPoint {
  Vec2 xi;
  double weight;
};

const std::vector<QuadPoint>& bulk_quadrature(ElemKind kind);

/// Shape values at a reference point.
Eigen::Vector4d shape_values(ElemKind kind, const Vec2& xi);

/// Shape gradients w.r.t. reference coordinates, one row per node.
Eigen::Matrix<double, 4, 2> shape_ref_gradients(ElemKind kind, const Vec2& xi);

struct ElemGeom {
  ElemKind kind;
  int n;
  std::array<Vec2, 4> x;  // node coordinates
};

ElemGeom element_geometry(const Mesh& mesh, int e);

struct MappedPoint {
  Eigen::Vector4d N;                    // shape values
  Eigen::Matrix<double, 4, 2> dN;       // physical gradients, row per node
  double detJ;
};

MappedPoint map_at(const ElemGeom& g, const Vec2& xi);

/// Physical position of a reference point.
Vec2 physical_point(const ElemGeom& g, const Vec2& xi);

/// Inverse isoparametric map. Affine solve for tri3, Newton for quad4.
Vec2 reference_coords(const ElemGeom& g, const Vec2& x);

/// True if x lies inside the element (reference-domain test with tolerance).
bool element_contains(const ElemGeom& g, const Vec2& x, double tol = 1e-10);

struct FacetQuadPoint {
  double s;       // parameter in [0,1] along the facet
  double weight;  // includes facet length
};

/// 2-point Gauss rule on the segment [p0, p1]; weights sum to the length.
std::vector<FacetQuadPoint> facet_quadrature(const Vec2& p0, const Vec2& p1);

}  // namespace sczm
