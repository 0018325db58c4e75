#include "sczm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sczm/errors.hpp"
#include "sczm/io_util.hpp"

namespace sczm {

namespace {

double tri_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

void check_bounds(const Rect& r) {
  if (!(r.xmax > r.xmin) || !(r.ymax > r.ymin))
    throw InvalidInputError("degenerate bounds");
}

}  // namespace

double Mesh::element_area(int e) const {
  const Element& el = elements[e];
  if (el.kind == ElemKind::Tri3) {
    return tri_area(nodes[el.nodes[0]], nodes[el.nodes[1]], nodes[el.nodes[2]]);
  }
  // quad: split by a diagonal
  return tri_area(nodes[el.nodes[0]], nodes[el.nodes[1]], nodes[el.nodes[2]]) +
         tri_area(nodes[el.nodes[0]], nodes[el.nodes[2]], nodes[el.nodes[3]]);
}

Vec2 Mesh::element_centroid(int e) const {
  const Element& el = elements[e];
  Vec2 c = Vec2::Zero();
  for (int i = 0; i < el.n(); ++i) c += nodes[el.nodes[i]];
  return c / el.n();
}

double Mesh::total_area() const {
  double a = 0;
  for (int e = 0; e < num_elements(); ++e) a += element_area(e);
  return a;
}

void Mesh::validate() const {
  const int nn = num_nodes();
  for (int e = 0; e < num_elements(); ++e) {
    const Element& el = elements[e];
    for (int i = 0; i < el.n(); ++i) {
      if (el.nodes[i] < 0 || el.nodes[i] >= nn)
        throw TopologyError("element " + std::to_string(e) + " references invalid node");
    }
    if (el.kind == ElemKind::Tri3) {
      if (tri_area(nodes[el.nodes[0]], nodes[el.nodes[1]], nodes[el.nodes[2]]) <= 0.0)
        throw TopologyError("inverted tri3 element " + std::to_string(e));
    } else {
      // bilinear Jacobian is positive on the whole element iff all four
      // corner triangles are positively oriented
      for (int i = 0; i < 4; ++i) {
        const Vec2& a = nodes[el.nodes[i]];
        const Vec2& b = nodes[el.nodes[(i + 1) % 4]];
        const Vec2& d = nodes[el.nodes[(i + 3) % 4]];
        if (tri_area(a, b, d) <= 0.0)
          throw TopologyError("inverted quad4 element " + std::to_string(e));
      }
    }
  }
  if (region_id.size() != elements.size())
    throw TopologyError("region id count does not match element count");
}

Mesh build_structured_quad(int nx, int ny, const Rect& bounds) {
  if (nx < 1 || ny < 1) throw InvalidInputError("nx, ny must be >= 1");
  check_bounds(bounds);
  Mesh m;
  const int nnx = nx + 1, nny = ny + 1;
  m.nodes.reserve(static_cast<size_t>(nnx) * nny);
  for (int j = 0; j < nny; ++j)
    for (int i = 0; i < nnx; ++i)
      m.nodes.emplace_back(bounds.xmin + bounds.width() * i / nx,
                           bounds.ymin + bounds.height() * j / ny);
  auto nid = [nnx](int i, int j) { return j * nnx + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Element el;
      el.kind = ElemKind::Quad4;
      el.nodes = {nid(i, j), nid(i + 1, j), nid(i + 1, j + 1), nid(i, j + 1)};
      m.elements.push_back(el);
    }
  m.region_id.assign(m.elements.size(), 1);
  tag_rectangle_boundaries(m);
  m.validate();
  return m;
}

Mesh build_crossed_tri(int nx, int ny, const Rect& bounds) {
  if (nx < 1 || ny < 1) throw InvalidInputError("nx, ny must be >= 1");
  check_bounds(bounds);
  Mesh m;
  const int nnx = nx + 1, nny = ny + 1;
  for (int j = 0; j < nny; ++j)
    for (int i = 0; i < nnx; ++i)
      m.nodes.emplace_back(bounds.xmin + bounds.width() * i / nx,
                           bounds.ymin + bounds.height() * j / ny);
  auto nid = [nnx](int i, int j) { return j * nnx + i; };
  // cell centers appended after the corner grid
  const int center0 = nnx * nny;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec2 c = 0.25 * (m.nodes[nid(i, j)] + m.nodes[nid(i + 1, j)] +
                             m.nodes[nid(i + 1, j + 1)] + m.nodes[nid(i, j + 1)]);
      m.nodes.push_back(c);
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int bl = nid(i, j), br = nid(i + 1, j), tr = nid(i + 1, j + 1), tl = nid(i, j + 1);
      const int c = center0 + j * nx + i;
      auto add = [&m](int a, int b, int cc) {
        Element el;
        el.kind = ElemKind::Tri3;
        el.nodes = {a, b, cc, -1};
        m.elements.push_back(el);
      };
      add(bl, br, c);  // south
      add(br, tr, c);  // east
      add(tr, tl, c);  // north
      add(tl, bl, c);  // west
    }
  m.region_id.assign(m.elements.size(), 1);
  tag_rectangle_boundaries(m);
  m.validate();
  return m;
}

void tag_rectangle_boundaries(Mesh& mesh) {
  if (mesh.nodes.empty()) return;
  double xmin = mesh.nodes[0].x(), xmax = xmin, ymin = mesh.nodes[0].y(), ymax = ymin;
  for (const Vec2& p : mesh.nodes) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  const double tol = 1e-12 * std::max(xmax - xmin, ymax - ymin);
  mesh.boundary_tags.clear();
  std::vector<int> left, right, bottom, top;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Vec2& p = mesh.nodes[i];
    if (std::abs(p.x() - xmin) < tol) left.push_back(i);
    if (std::abs(p.x() - xmax) < tol) right.push_back(i);
    if (std::abs(p.y() - ymin) < tol) bottom.push_back(i);
    if (std::abs(p.y() - ymax) < tol) top.push_back(i);
  }
  mesh.boundary_tags["left"] = std::move(left);
  mesh.boundary_tags["right"] = std::move(right);
  mesh.boundary_tags["bottom"] = std::move(bottom);
  mesh.boundary_tags["top"] = std::move(top);
}

namespace {

// Per-element edges with a deterministic (sorted endpoint) key.
struct EdgeKey {
  int a, b;
  bool operator<(const EdgeKey& o) const { return a != o.a ? a < o.a : b < o.b; }
};

std::vector<std::array<int, 2>> element_edges(const Element& el) {
  std::vector<std::array<int, 2>> e;
  const int n = el.n();
  for (int i = 0; i < n; ++i) e.push_back({el.nodes[i], el.nodes[(i + 1) % n]});
  return e;
}

}  // namespace

std::vector<Facet> interior_facets(const Mesh& mesh) {
  std::map<EdgeKey, std::vector<int>> adj;
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (const auto& ed : element_edges(mesh.elements[e])) {
      EdgeKey k{std::min(ed[0], ed[1]), std::max(ed[0], ed[1])};
      adj[k].push_back(e);
    }
  std::vector<Facet> out;
  for (const auto& [k, elems] : adj) {
    if (elems.size() > 2)
      throw TopologyError("non-manifold facet between nodes " + std::to_string(k.a) + "," +
                          std::to_string(k.b));
    if (elems.size() != 2) continue;
    int ea = elems[0], eb = elems[1];
    // minus side: lower region id, ties broken by lower element id
    int minus = ea, plus = eb;
    const int ra = mesh.region_id[ea], rb = mesh.region_id[eb];
    if (rb < ra || (rb == ra && eb < ea)) std::swap(minus, plus);
    Facet f;
    f.n0 = k.a;
    f.n1 = k.b;
    f.minus_element = minus;
    f.plus_element = plus;
    const Vec2 t = (mesh.nodes[k.b] - mesh.nodes[k.a]).normalized();
    Vec2 nrm(t.y(), -t.x());
    // orient toward the plus element centroid
    const Vec2 mid = 0.5 * (mesh.nodes[k.a] + mesh.nodes[k.b]);
    if (nrm.dot(mesh.element_centroid(plus) - mid) < 0) nrm = -nrm;
    f.normal = nrm;
    out.push_back(f);
  }
  return out;
}

double characteristic_size(const Mesh& mesh) {
  if (mesh.num_elements() == 0) throw InvalidInputError("empty mesh");
  return std::sqrt(mesh.total_area() / mesh.num_elements());
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

SplitMesh split_fitted_interface(const Mesh& mesh, const Segment2& interface) {
  const double scale = (interface.b - interface.a).norm();
  if (scale == 0) throw InvalidInputError("degenerate interface segment");
  const double tol = 1e-12 * std::max(scale, characteristic_size(mesh));

  // collect interior facets lying exactly on the segment
  std::vector<Facet> on_line;
  double covered = 0;
  for (const Facet& f : interior_facets(mesh)) {
    const Vec2& p0 = mesh.nodes[f.n0];
    const Vec2& p1 = mesh.nodes[f.n1];
    if (point_segment_distance(p0, interface.a, interface.b) < tol &&
        point_segment_distance(p1, interface.a, interface.b) < tol) {
      on_line.push_back(f);
      covered += (p1 - p0).norm();
    }
  }
  if (std::abs(covered - scale) > 1e-9 * scale)
    throw InvalidInputError("interface is not aligned with mesh facet chains");

  // region ids by side of the line
  Mesh work = mesh;
  const Vec2 dir = (interface.b - interface.a).normalized();
  const Vec2 nrm(dir.y(), -dir.x());
  for (int e = 0; e < work.num_elements(); ++e) {
    const double s = nrm.dot(work.element_centroid(e) - interface.a);
    work.region_id[e] = s > 0 ? 2 : 1;
  }
  // re-derive facets so the minus/plus convention reflects the new regions
  std::vector<Facet> facets;
  for (const Facet& f : interior_facets(work)) {
    if (work.region_id[f.minus_element] != work.region_id[f.plus_element]) facets.push_back(f);
  }
  return split_along_facets(work, facets);
}

SplitMesh split_along_facets(const Mesh& mesh, const std::vector<Facet>& facets) {
  SplitMesh out;
  out.mesh = mesh;

  std::set<int> seam_nodes;
  for (const Facet& f : facets) {
    seam_nodes.insert(f.n0);
    seam_nodes.insert(f.n1);
  }

  // node -> adjacent elements
  std::vector<std::vector<int>> node_elems(mesh.num_nodes());
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int i = 0; i < mesh.elements[e].n(); ++i)
      node_elems[mesh.elements[e].nodes[i]].push_back(e);

  out.source_node.resize(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) out.source_node[i] = i;

  // duplicate each seam node: one copy per distinct adjacent region,
  // lowest region keeps the original id
  for (int n : seam_nodes) {
    std::set<int> regions;
    for (int e : node_elems[n]) regions.insert(mesh.region_id[e]);
    if (regions.size() < 2) continue;
    bool first = true;
    for (int r : regions) {
      int node_id = n;
      if (!first) {
        node_id = out.mesh.num_nodes();
        out.mesh.nodes.push_back(mesh.nodes[n]);
        out.source_node.push_back(n);
        // copies inherit the boundary tags of the original node
        for (auto& [name, ids] : out.mesh.boundary_tags) {
          if (std::find(ids.begin(), ids.end(), n) != ids.end()) ids.push_back(node_id);
        }
      }
      if (!first) {
        for (int e : node_elems[n]) {
          if (mesh.region_id[e] != r) continue;
          Element& el = out.mesh.elements[e];
          for (int i = 0; i < el.n(); ++i)
            if (el.nodes[i] == n) el.nodes[i] = node_id;
        }
      }
      first = false;
    }
  }

  for (const Facet& f : facets) {
    SeamFacet s;
    s.p0 = mesh.nodes[f.n0];
    s.p1 = mesh.nodes[f.n1];
    s.normal = f.normal;
    s.minus_element = f.minus_element;
    s.plus_element = f.plus_element;
    out.seams.push_back(s);
  }
  out.mesh.validate();
  return out;
}

int count_connected_components(const Mesh& mesh) {
  std::vector<std::vector<int>> node_elems(mesh.num_nodes());
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int i = 0; i < mesh.elements[e].n(); ++i)
      node_elems[mesh.elements[e].nodes[i]].push_back(e);
  std::vector<int> comp(mesh.num_elements(), -1);
  int ncomp = 0;
  for (int seed = 0; seed < mesh.num_elements(); ++seed) {
    if (comp[seed] >= 0) continue;
    std::vector<int> stack{seed};
    comp[seed] = ncomp;
    while (!stack.empty()) {
      int e = stack.back();
      stack.pop_back();
      for (int i = 0; i < mesh.elements[e].n(); ++i)
        for (int other : node_elems[mesh.elements[e].nodes[i]])
          if (comp[other] < 0) {
            comp[other] = ncomp;
            stack.push_back(other);
          }
    }
    ++ncomp;
  }
  return ncomp;
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "nodes " << mesh.num_nodes() << " elements " << mesh.num_elements() << " dim 2\n";
  for (const Vec2& p : mesh.nodes)
    out << fmt_double(p.x()) << ' ' << fmt_double(p.y()) << '\n';
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Element& el = mesh.elements[e];
    out << (el.kind == ElemKind::Tri3 ? "tri3" : "quad4");
    for (int i = 0; i < el.n(); ++i) out << ' ' << el.nodes[i];
    out << ' ' << mesh.region_id[e] << '\n';
  }
}

Mesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string kw;
  int nn = 0, ne = 0, dim = 0;
  std::string kw2, kw3;
  in >> kw >> nn >> kw2 >> ne >> kw3 >> dim;
  if (kw != "nodes" || kw2 != "elements" || kw3 != "dim" || dim != 2)
    throw IoError("bad mesh header in " + path);
  Mesh m;
  m.nodes.resize(nn);
  for (int i = 0; i < nn; ++i) in >> m.nodes[i].x() >> m.nodes[i].y();
  m.elements.resize(ne);
  m.region_id.resize(ne);
  for (int e = 0; e < ne; ++e) {
    std::string kind;
    in >> kind;
    Element& el = m.elements[e];
    el.nodes = {-1, -1, -1, -1};
    if (kind == "tri3") {
      el.kind = ElemKind::Tri3;
      in >> el.nodes[0] >> el.nodes[1] >> el.nodes[2];
    } else if (kind == "quad4") {
      el.kind = ElemKind::Quad4;
      in >> el.nodes[0] >> el.nodes[1] >> el.nodes[2] >> el.nodes[3];
    } else {
      throw IoError("unknown element kind '" + kind + "' in " + path);
    }
    in >> m.region_id[e];
  }
  if (!in) throw IoError("truncated mesh file: " + path);
  tag_rectangle_boundaries(m);
  m.validate();
  return m;
}

void write_field(const NodalField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "field " << field.name << " components " << field.components << '\n';
  const int n = static_cast<int>(field.values.size()) / field.components;
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < field.components; ++c) {
      if (c) out << ' ';
      out << fmt_double(field.values[i * field.components + c]);
    }
    out << '\n';
  }
}

NodalField read_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string kw, compkw;
  NodalField f;
  in >> kw >> f.name >> compkw >> f.components;
  if (kw != "field" || compkw != "components") throw IoError("bad field header in " + path);
  double v;
  while (in >> v) f.values.push_back(v);
  if (f.values.size() % f.components != 0) throw IoError("ragged field file: " + path);
  return f;
}

}  // namespace sczm
