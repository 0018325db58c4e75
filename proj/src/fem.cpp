#include "sczm/fem.hpp"

#include <cmath>

#include "sczm/errors.hpp"

namespace sczm {

const std::vector<QuadPoint>& bulk_quadrature(ElemKind kind) {
  static const std::vector<QuadPoint> tri = {
      {{1.0 / 6.0, 1.0 / 6.0}, 1.0 / 6.0},
      {{2.0 / 3.0, 1.0 / 6.0}, 1.0 / 6.0},
      {{1.0 / 6.0, 2.0 / 3.0}, 1.0 / 6.0},
  };
  static const std::vector<QuadPoint> quad = [] {
    const double g = 1.0 / std::sqrt(3.0);
    std::vector<QuadPoint> q;
    for (double eta : {-g, g})
      for (double xi : {-g, g}) q.push_back({{xi, eta}, 1.0});
    return q;
  }();
  return kind == ElemKind::Tri3 ? tri : quad;
}

Eigen::Vector4d shape_values(ElemKind kind, const Vec2& p) {
  Eigen::Vector4d N = Eigen::Vector4d::Zero();
  if (kind == ElemKind::Tri3) {
    N[0] = 1.0 - p.x() - p.y();
    N[1] = p.x();
    N[2] = p.y();
  } else {
    const double xi = p.x(), eta = p.y();
    N[0] = 0.25 * (1 - xi) * (1 - eta);
    N[1] = 0.25 * (1 + xi) * (1 - eta);
    N[2] = 0.25 * (1 + xi) * (1 + eta);
    N[3] = 0.25 * (1 - xi) * (1 + eta);
  }
  return N;
}

Eigen::Matrix<double, 4, 2> shape_ref_gradients(ElemKind kind, const Vec2& p) {
  Eigen::Matrix<double, 4, 2> dN = Eigen::Matrix<double, 4, 2>::Zero();
  if (kind == ElemKind::Tri3) {
    dN(0, 0) = -1;
    dN(0, 1) = -1;
    dN(1, 0) = 1;
    dN(2, 1) = 1;
  } else {
    const double xi = p.x(), eta = p.y();
    dN(0, 0) = -0.25 * (1 - eta);
    dN(0, 1) = -0.25 * (1 - xi);
    dN(1, 0) = 0.25 * (1 - eta);
    dN(1, 1) = -0.25 * (1 + xi);
    dN(2, 0) = 0.25 * (1 + eta);
    dN(2, 1) = 0.25 * (1 + xi);
    dN(3, 0) = -0.25 * (1 + eta);
    dN(3, 1) = 0.25 * (1 - xi);
  }
  return dN;
}

ElemGeom element_geometry(const Mesh& mesh, int e) {
  const Element& el = mesh.elements[e];
  ElemGeom g;
  g.kind = el.kind;
  g.n = el.n();
  for (int i = 0; i < g.n; ++i) g.x[i] = mesh.nodes[el.nodes[i]];
  return g;
}

MappedPoint map_at(const ElemGeom& g, const Vec2& xi) {
  MappedPoint mp;
  mp.N = shape_values(g.kind, xi);
  const auto dNr = shape_ref_gradients(g.kind, xi);
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (int i = 0; i < g.n; ++i) J += g.x[i] * dNr.row(i);
  mp.detJ = J.determinant();
  if (mp.detJ <= 0) throw DegenerateGeometryError("non-positive Jacobian");
  const Eigen::Matrix2d Jinv = J.inverse();
  mp.dN.setZero();
  for (int i = 0; i < g.n; ++i) mp.dN.row(i) = dNr.row(i) * Jinv;
  return mp;
}

Vec2 physical_point(const ElemGeom& g, const Vec2& xi) {
  const auto N = shape_values(g.kind, xi);
  Vec2 x = Vec2::Zero();
  for (int i = 0; i < g.n; ++i) x += N[i] * g.x[i];
  return x;
}

Vec2 reference_coords(const ElemGeom& g, const Vec2& x) {
  if (g.kind == ElemKind::Tri3) {
    Eigen::Matrix2d A;
    A.col(0) = g.x[1] - g.x[0];
    A.col(1) = g.x[2] - g.x[0];
    return A.inverse() * (x - g.x[0]);
  }
  // Newton on the bilinear map; converges in a couple of iterations for
  // non-degenerate quads
  Vec2 xi = Vec2::Zero();
  for (int it = 0; it < 12; ++it) {
    const auto N = shape_values(g.kind, xi);
    const auto dNr = shape_ref_gradients(g.kind, xi);
    Vec2 r = -x;
    Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
    for (int i = 0; i < g.n; ++i) {
      r += N[i] * g.x[i];
      J += g.x[i] * dNr.row(i);
    }
    if (r.norm() < 1e-14) break;
    xi -= J.inverse() * r;
  }
  return xi;
}

bool element_contains(const ElemGeom& g, const Vec2& x, double tol) {
  const Vec2 xi = reference_coords(g, x);
  if (g.kind == ElemKind::Tri3)
    return xi.x() >= -tol && xi.y() >= -tol && xi.x() + xi.y() <= 1.0 + tol;
  return std::abs(xi.x()) <= 1.0 + tol && std::abs(xi.y()) <= 1.0 + tol;
}

std::vector<FacetQuadPoint> facet_quadrature(const Vec2& p0, const Vec2& p1) {
  const double len = (p1 - p0).norm();
  const double g = 1.0 / std::sqrt(3.0);
  return {{0.5 * (1.0 - g), 0.5 * len}, {0.5 * (1.0 + g), 0.5 * len}};
}

}  // namespace sczm
