#include "sczm/conformalize.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>

#include "sczm/clip.hpp"
#include "sczm/errors.hpp"
#include "sczm/fem.hpp"
#include "sczm/io_util.hpp"

namespace sczm {

namespace {

Polygon element_polygon(const Mesh& mesh, int e) {
  Polygon p;
  const Element& el = mesh.elements[e];
  for (int i = 0; i < el.n(); ++i) p.push_back(mesh.nodes[el.nodes[i]]);
  return p;
}

// exact-byte key so nodes produced by clipping from either side of a shared
// grain edge merge reliably
struct CoordKey {
  std::array<unsigned char, 16> bytes;
  bool operator<(const CoordKey& o) const { return bytes < o.bytes; }
};

CoordKey key_of(const Vec2& p) {
  CoordKey k;
  const double x = p.x() == 0.0 ? 0.0 : p.x();  // normalize -0
  const double y = p.y() == 0.0 ? 0.0 : p.y();
  std::memcpy(k.bytes.data(), &x, 8);
  std::memcpy(k.bytes.data() + 8, &y, 8);
  return k;
}

}  // namespace

IFMMesh conformalize(const Mesh& mesh, const GrainSet& grains) {
  grains.validate();
  const double h = characteristic_size(mesh);
  const double sliver_tol = 1e-14 * h * h;

  IFMMesh out;
  // per-block node registry: (block, coords) -> output node id
  std::map<std::pair<int, CoordKey>, int> registry;

  auto node_for = [&](int block, const Vec2& x) {
    const auto key = std::make_pair(block, key_of(x));
    const auto it = registry.find(key);
    if (it != registry.end()) return it->second;
    const int id = out.mesh.num_nodes();
    out.mesh.nodes.push_back(x);
    registry.emplace(key, id);
    return id;
  };

  auto add_tri = [&](int block, const Vec2& a, const Vec2& b, const Vec2& c) {
    Element el;
    el.kind = ElemKind::Tri3;
    el.nodes = {node_for(block, a), node_for(block, b), node_for(block, c), -1};
    out.mesh.elements.push_back(el);
    out.mesh.region_id.push_back(block);
  };

  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Polygon elem_poly = element_polygon(mesh, e);
    const double elem_area = polygon_area(elem_poly);

    std::vector<std::pair<int, Polygon>> pieces;
    for (const Grain& g : grains.grains) {
      Polygon piece = clip_convex(elem_poly, g.polygon);
      if (piece.size() < 3) continue;
      const double area = polygon_area(piece);
      if (area < sliver_tol) {
        out.dropped_sliver_area += area;
        continue;
      }
      pieces.emplace_back(g.id, std::move(piece));
    }
    if (pieces.empty())
      throw CoverageError("element " + std::to_string(e) + " lies in no grain");

    if (pieces.size() == 1 &&
        std::abs(polygon_area(pieces[0].second) - elem_area) < 1e-12 * elem_area) {
      // untouched element: copy verbatim
      const Element& el = mesh.elements[e];
      Element copy = el;
      for (int i = 0; i < el.n(); ++i)
        copy.nodes[i] = node_for(pieces[0].first, mesh.nodes[el.nodes[i]]);
      out.mesh.elements.push_back(copy);
      out.mesh.region_id.push_back(pieces[0].first);
      continue;
    }
    for (const auto& [block, piece] : pieces)
      for (const auto& tri : fan_triangulate(piece)) add_tri(block, tri[0], tri[1], tri[2]);
  }

  // node markers: 0 for nodes coincident with a source node; otherwise 1
  // when some containing source element carries the node's block, else 2
  std::map<CoordKey, int> source_lookup;
  for (int i = 0; i < mesh.num_nodes(); ++i) source_lookup.emplace(key_of(mesh.nodes[i]), i);

  const SearchStructure search = build_search_structure(mesh);
  const std::vector<int> block_of = [&] {
    std::vector<int> b(out.mesh.num_nodes(), -1);
    for (int e = 0; e < out.mesh.num_elements(); ++e)
      for (int i = 0; i < out.mesh.elements[e].n(); ++i)
        b[out.mesh.elements[e].nodes[i]] = out.mesh.region_id[e];
    return b;
  }();

  out.node_marker.assign(out.mesh.num_nodes(), 2);
  out.source_node_id.assign(out.mesh.num_nodes(), -1);
  for (int n = 0; n < out.mesh.num_nodes(); ++n) {
    const auto it = source_lookup.find(key_of(out.mesh.nodes[n]));
    if (it != source_lookup.end()) {
      out.node_marker[n] = 0;
      out.source_node_id[n] = it->second;
      continue;
    }
    if (find_source_elem(out.mesh.nodes[n], block_of[n], search, mesh).has_value())
      out.node_marker[n] = 1;
  }

  if (out.dropped_sliver_area > 0)
    std::cerr << "warning: dropped sliver pieces totalling area " << out.dropped_sliver_area
              << "\n";
  tag_rectangle_boundaries(out.mesh);
  out.mesh.validate();
  return out;
}

std::optional<int> SearchStructure::direct_lookup(const Vec2& x) const {
  if (!is_uniform) return std::nullopt;
  const int i = static_cast<int>(std::floor((x.x() - bounds.xmin) / bounds.width() * nx));
  const int j = static_cast<int>(std::floor((x.y() - bounds.ymin) / bounds.height() * ny));
  if (i < 0 || i >= nx || j < 0 || j >= ny) return std::nullopt;
  return lookup[j * nx + i];
}

SearchStructure build_search_structure(const Mesh& mesh) {
  SearchStructure s;
  std::vector<Vec2> centroids;
  centroids.reserve(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) centroids.push_back(mesh.element_centroid(e));
  s.centroid_tree = KdTree<2>(std::move(centroids));

  // uniformity: all elements are quads of identical extents on a regular grid
  s.is_uniform = true;
  double xmin = mesh.nodes[0].x(), xmax = xmin, ymin = mesh.nodes[0].y(), ymax = ymin;
  for (const Vec2& p : mesh.nodes) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  s.bounds = Rect{xmin, ymin, xmax, ymax};
  double wx = -1, wy = -1;
  const double tol = 1e-12 * std::max(xmax - xmin, ymax - ymin);
  for (int e = 0; e < mesh.num_elements() && s.is_uniform; ++e) {
    const Element& el = mesh.elements[e];
    if (el.kind != ElemKind::Quad4) {
      s.is_uniform = false;
      break;
    }
    const Vec2& a = mesh.nodes[el.nodes[0]];
    const Vec2& b = mesh.nodes[el.nodes[1]];
    const Vec2& d = mesh.nodes[el.nodes[3]];
    const double ex = std::abs(b.x() - a.x());
    const double ey = std::abs(d.y() - a.y());
    if (std::abs(b.y() - a.y()) > tol || std::abs(d.x() - a.x()) > tol) {
      s.is_uniform = false;
      break;
    }
    if (wx < 0) {
      wx = ex;
      wy = ey;
    } else if (std::abs(ex - wx) > tol || std::abs(ey - wy) > tol) {
      s.is_uniform = false;
      break;
    }
  }
  if (s.is_uniform && wx > 0 && wy > 0) {
    s.nx = static_cast<int>(std::lround((xmax - xmin) / wx));
    s.ny = static_cast<int>(std::lround((ymax - ymin) / wy));
    if (s.nx * s.ny != mesh.num_elements()) {
      s.is_uniform = false;
    } else {
      s.lookup.assign(s.nx * s.ny, -1);
      for (int e = 0; e < mesh.num_elements(); ++e) {
        const Vec2 c = mesh.element_centroid(e);
        const int i = static_cast<int>(std::floor((c.x() - xmin) / wx));
        const int j = static_cast<int>(std::floor((c.y() - ymin) / wy));
        if (i < 0 || i >= s.nx || j < 0 || j >= s.ny || s.lookup[j * s.nx + i] >= 0) {
          s.is_uniform = false;
          break;
        }
        s.lookup[j * s.nx + i] = e;
      }
    }
  }
  if (!s.is_uniform) {
    s.lookup.clear();
    s.nx = s.ny = 0;
  }
  return s;
}

std::optional<int> find_source_elem(const Vec2& x, int block, const SearchStructure& s,
                                    const Mesh& mesh) {
  const double tol = 1e-9;
  if (const auto direct = s.direct_lookup(x)) {
    const int e = *direct;
    if (mesh.region_id[e] == block && element_contains(element_geometry(mesh, e), x, tol))
      return e;
  }
  const int k = std::min(16, mesh.num_elements());
  for (int e : s.centroid_tree.nearest(x, k)) {
    if (mesh.region_id[e] != block) continue;
    if (element_contains(element_geometry(mesh, e), x, tol)) return e;
  }
  return std::nullopt;
}

namespace {

Vec2 interpolate_in(const Mesh& mesh, int e, const NodalField& u, const Vec2& x) {
  const ElemGeom g = element_geometry(mesh, e);
  const MappedPoint mp = map_at(g, reference_coords(g, x));
  const Element& el = mesh.elements[e];
  Vec2 v = Vec2::Zero();
  for (int a = 0; a < g.n; ++a) {
    v.x() += mp.N[a] * u.values[2 * el.nodes[a]];
    v.y() += mp.N[a] * u.values[2 * el.nodes[a] + 1];
  }
  return v;
}

Vec2 taylor_recover(const Mesh& mesh, int e, const NodalField& u, const Vec2& x) {
  // expand about the element's node closest to x
  const Element& el = mesh.elements[e];
  int best = el.nodes[0];
  double best_d = (mesh.nodes[best] - x).norm();
  for (int i = 1; i < el.n(); ++i) {
    const double d = (mesh.nodes[el.nodes[i]] - x).norm();
    if (d < best_d) {
      best_d = d;
      best = el.nodes[i];
    }
  }
  const Vec2 xs = mesh.nodes[best];
  const ElemGeom g = element_geometry(mesh, e);
  const MappedPoint mp = map_at(g, reference_coords(g, xs));
  Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();  // grad(i,j) = d u_i / d x_j
  for (int a = 0; a < g.n; ++a)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) grad(i, j) += mp.dN(a, j) * u.values[2 * el.nodes[a] + i];
  const Vec2 us(u.values[2 * best], u.values[2 * best + 1]);
  return us + grad * (x - xs);
}

int closest_same_block_elem(const Vec2& x, int block, const SearchStructure& s, const Mesh& mesh) {
  for (int k = 8; k <= std::max(8, mesh.num_elements()); k *= 4) {
    for (int e : s.centroid_tree.nearest(x, std::min(k, mesh.num_elements())))
      if (mesh.region_id[e] == block) return e;
    if (k >= mesh.num_elements()) break;
  }
  throw ProjectionError("no source element in block " + std::to_string(block));
}

}  // namespace

NodalField project_solution(const IFMMesh& ifm, const Mesh& source, const NodalField& u) {
  if (static_cast<int>(u.values.size()) != 2 * source.num_nodes())
    throw InvalidInputError("field size does not match the source mesh");
  const SearchStructure search = build_search_structure(source);

  std::vector<std::vector<int>> src_node_blocks(source.num_nodes());
  for (int e = 0; e < source.num_elements(); ++e)
    for (int i = 0; i < source.elements[e].n(); ++i)
      src_node_blocks[source.elements[e].nodes[i]].push_back(source.region_id[e]);

  std::vector<int> block_of(ifm.mesh.num_nodes(), -1);
  for (int e = 0; e < ifm.mesh.num_elements(); ++e)
    for (int i = 0; i < ifm.mesh.elements[e].n(); ++i)
      block_of[ifm.mesh.elements[e].nodes[i]] = ifm.mesh.region_id[e];

  NodalField out;
  out.name = u.name;
  out.components = 2;
  out.values.assign(2 * ifm.mesh.num_nodes(), 0.0);

  for (int n = 0; n < ifm.mesh.num_nodes(); ++n) {
    const Vec2 x = ifm.mesh.nodes[n];
    const int block = block_of[n];
    Vec2 v;
    if (ifm.node_marker[n] == 0) {
      const int src = ifm.source_node_id[n];
      // a marker-0 node whose source belongs to a different block falls
      // back to the recovery path
      const auto& blocks = src_node_blocks[src];
      const bool compatible = std::find(blocks.begin(), blocks.end(), block) != blocks.end();
      if (compatible) {
        v = Vec2(u.values[2 * src], u.values[2 * src + 1]);
        out.values[2 * n] = v.x();
        out.values[2 * n + 1] = v.y();
        continue;
      }
    }
    if (ifm.node_marker[n] == 1 || ifm.node_marker[n] == 0) {
      if (const auto e = find_source_elem(x, block, search, source)) {
        v = interpolate_in(source, *e, u, x);
        out.values[2 * n] = v.x();
        out.values[2 * n + 1] = v.y();
        continue;
      }
    }
    const int e = closest_same_block_elem(x, block, search, source);
    v = taylor_recover(source, e, u, x);
    out.values[2 * n] = v.x();
    out.values[2 * n + 1] = v.y();
  }
  return out;
}

std::vector<SeamFacet> extract_ifm_seams(const IFMMesh& ifm) {
  // boundary-in-adjacency edges keyed by exact endpoint bytes
  struct EdgeUse {
    int element;
    int block;
  };
  std::map<std::pair<CoordKey, CoordKey>, std::vector<EdgeUse>> edges;
  const Mesh& m = ifm.mesh;
  for (int e = 0; e < m.num_elements(); ++e) {
    const Element& el = m.elements[e];
    for (int i = 0; i < el.n(); ++i) {
      const Vec2& a = m.nodes[el.nodes[i]];
      const Vec2& b = m.nodes[el.nodes[(i + 1) % el.n()]];
      auto ka = key_of(a), kb = key_of(b);
      if (kb < ka) std::swap(ka, kb);
      edges[{ka, kb}].push_back({e, m.region_id[e]});
    }
  }
  std::vector<SeamFacet> seams;
  for (const auto& [key, uses] : edges) {
    if (uses.size() != 2 || uses[0].block == uses[1].block) continue;
    const EdgeUse& minus = uses[0].block < uses[1].block ? uses[0] : uses[1];
    const EdgeUse& plus = uses[0].block < uses[1].block ? uses[1] : uses[0];
    SeamFacet s;
    std::memcpy(s.p0.data(), key.first.bytes.data(), 16);
    std::memcpy(s.p1.data(), key.second.bytes.data(), 16);
    s.minus_element = minus.element;
    s.plus_element = plus.element;
    const Vec2 t = (s.p1 - s.p0).normalized();
    Vec2 nrm(t.y(), -t.x());
    if (nrm.dot(m.element_centroid(plus.element) - 0.5 * (s.p0 + s.p1)) < 0) nrm = -nrm;
    s.normal = nrm;
    seams.push_back(s);
  }
  return seams;
}

void write_ifm(const IFMMesh& ifm, const std::string& path) {
  write_mesh(ifm.mesh, path);
  std::ofstream out(path, std::ios::app);
  out << "node_markers\n";
  for (int m : ifm.node_marker) out << m << '\n';
  out << "source_node_ids\n";
  for (int s : ifm.source_node_id) out << s << '\n';
}

IFMMesh read_ifm(const std::string& path) {
  IFMMesh ifm;
  ifm.mesh = read_mesh(path);
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line))
    if (line == "node_markers") break;
  ifm.node_marker.resize(ifm.mesh.num_nodes());
  for (int i = 0; i < ifm.mesh.num_nodes(); ++i) in >> ifm.node_marker[i];
  in >> line;
  if (line != "source_node_ids") throw IoError("missing source_node_ids in " + path);
  ifm.source_node_id.resize(ifm.mesh.num_nodes());
  for (int i = 0; i < ifm.mesh.num_nodes(); ++i) in >> ifm.source_node_id[i];
  if (!in) throw IoError("truncated IFM file: " + path);
  return ifm;
}

}  // namespace sczm
