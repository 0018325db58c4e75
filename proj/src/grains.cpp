#include "sczm/grains.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "sczm/errors.hpp"
#include "sczm/io_util.hpp"

namespace sczm {

const Grain* GrainSet::find(int id) const {
  for (const Grain& g : grains)
    if (g.id == id) return &g;
  return nullptr;
}

void GrainSet::validate() const {
  std::set<int> ids;
  for (const Grain& g : grains) {
    if (!ids.insert(g.id).second)
      throw InvalidInputError("duplicate grain id " + std::to_string(g.id));
    if (g.polygon.size() < 3)
      throw InvalidInputError("grain " + std::to_string(g.id) + " has fewer than 3 vertices");
    if (std::abs(polygon_area(g.polygon)) == 0.0)
      throw DegenerateGeometryError("grain " + std::to_string(g.id) + " has zero area");
    if (!polygon_is_convex(g.polygon))
      throw InvalidInputError("grain " + std::to_string(g.id) +
                              " is not convex; convex grain polygons are required");
  }
}

BoundaryRep2 GrainSet::boundary_of(int id) const {
  const Grain* g = find(id);
  if (!g) throw InvalidInputError("no grain with id " + std::to_string(id));
  return make_polygon_boundary(g->polygon);
}

GrainSet half_plane_grains(const Segment2& interface, const Rect& domain) {
  const Vec2 dir = (interface.b - interface.a).normalized();
  const Vec2 nrm(dir.y(), -dir.x());

  // corners of the domain sorted by side of the line
  const Polygon box = {{domain.xmin, domain.ymin},
                       {domain.xmax, domain.ymin},
                       {domain.xmax, domain.ymax},
                       {domain.xmin, domain.ymax}};
  const HalfPlane keep_neg{nrm, nrm.dot(interface.a)};
  const HalfPlane keep_pos{-nrm, -nrm.dot(interface.a)};

  GrainSet gs;
  Polygon neg = clip_half_plane(box, keep_neg);
  Polygon pos = clip_half_plane(box, keep_pos);
  if (neg.size() < 3 || pos.size() < 3)
    throw InvalidInputError("interface segment does not cut the domain");
  gs.grains.push_back({1, std::move(neg)});
  gs.grains.push_back({2, std::move(pos)});
  gs.validate();
  return gs;
}

GrainSet voronoi_grains(const std::vector<Vec2>& seeds, const Rect& domain) {
  const Polygon box = {{domain.xmin, domain.ymin},
                       {domain.xmax, domain.ymin},
                       {domain.xmax, domain.ymax},
                       {domain.xmin, domain.ymax}};
  GrainSet gs;
  const int n = static_cast<int>(seeds.size());
  for (int i = 0; i < n; ++i) {
    Polygon cell = box;
    for (int j = 0; j < n && !cell.empty(); ++j) {
      if (j == i) continue;
      // bisector computed from the canonical (lower index, higher index)
      // pair so shared cell edges coincide exactly
      const int lo = std::min(i, j), hi = std::max(i, j);
      Vec2 nrm = seeds[hi] - seeds[lo];
      double off = nrm.dot(0.5 * (seeds[lo] + seeds[hi]));
      if (i != lo) {
        nrm = -nrm;
        off = -off;
      }
      cell = clip_half_plane(cell, HalfPlane{nrm, off});
    }
    if (cell.size() < 3)
      throw DegenerateGeometryError("empty Voronoi cell for seed " + std::to_string(i));
    gs.grains.push_back({i + 1, std::move(cell)});
  }
  gs.validate();
  return gs;
}

namespace {

struct CanonicalEdge {
  std::array<double, 4> key;
  bool operator<(const CanonicalEdge& o) const { return key < o.key; }
};

CanonicalEdge canonical_edge(const Vec2& a, const Vec2& b) {
  const bool swap = (b.x() < a.x()) || (b.x() == a.x() && b.y() < a.y());
  const Vec2& p = swap ? b : a;
  const Vec2& q = swap ? a : b;
  return {{p.x(), p.y(), q.x(), q.y()}};
}

}  // namespace

std::vector<InterfaceSegment> shared_interface(const GrainSet& grains) {
  std::map<CanonicalEdge, std::vector<int>> owners;
  for (const Grain& g : grains.grains) {
    const int n = static_cast<int>(g.polygon.size());
    for (int i = 0; i < n; ++i)
      owners[canonical_edge(g.polygon[i], g.polygon[(i + 1) % n])].push_back(g.id);
  }
  std::vector<InterfaceSegment> out;
  for (const auto& [edge, ids] : owners) {
    if (ids.size() < 2) continue;
    if (ids.size() > 2) throw TopologyError("grain edge shared by more than two grains");
    InterfaceSegment s;
    s.a = Vec2(edge.key[0], edge.key[1]);
    s.b = Vec2(edge.key[2], edge.key[3]);
    s.grain_minus = std::min(ids[0], ids[1]);
    s.grain_plus = std::max(ids[0], ids[1]);
    const Vec2 dir = (s.b - s.a).normalized();
    Vec2 nrm(dir.y(), -dir.x());
    // orient from the lower grain toward the higher: the lower grain's
    // interior lies on the opposite side of nrm
    const Grain* gm = grains.find(s.grain_minus);
    Vec2 interior = Vec2::Zero();
    for (const Vec2& v : gm->polygon) interior += v;
    interior /= static_cast<double>(gm->polygon.size());
    if (nrm.dot(interior - 0.5 * (s.a + s.b)) > 0) nrm = -nrm;
    s.normal = nrm;
    out.push_back(s);
  }
  return out;
}

void write_grains(const GrainSet& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "grains " << g.grains.size() << '\n';
  for (const Grain& gr : g.grains) {
    out << "grain " << gr.id << " vertices " << gr.polygon.size() << '\n';
    for (const Vec2& v : gr.polygon) out << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << '\n';
  }
}

GrainSet read_grains(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string kw;
  int k = 0;
  in >> kw >> k;
  if (kw != "grains") throw IoError("bad grain header in " + path);
  GrainSet gs;
  for (int i = 0; i < k; ++i) {
    std::string kw2, kw3;
    int id = 0, nv = 0;
    in >> kw2 >> id >> kw3 >> nv;
    if (kw2 != "grain" || kw3 != "vertices") throw IoError("bad grain record in " + path);
    Grain g;
    g.id = id;
    g.polygon.resize(nv);
    for (int v = 0; v < nv; ++v) in >> g.polygon[v].x() >> g.polygon[v].y();
    gs.grains.push_back(std::move(g));
  }
  if (!in) throw IoError("truncated grain file: " + path);
  gs.validate();
  return gs;
}

}  // namespace sczm
