#pragma once

#include <string>
#include <vector>

#include "sczm/classify.hpp"
#include "sczm/clip.hpp"
#include "sczm/mesh.hpp"

namespace sczm {

struct Grain {
  int id;
  Polygon polygon;  // closed, convex, counter-clockwise after load
};

/// Grains tiling the domain; ids unique, each polygon watertight.
struct GrainSet {
  std::vector<Grain> grains;

  const Grain* find(int id) const;
  void validate() const;
  BoundaryRep2 boundary_of(int id) const;
};

/// Two half-plane grains covering `domain`, split by the segment's carrier
/// line: grain 1 on the negative side of the left normal, grain 2 positive.
GrainSet half_plane_grains(const Segment2& interface, const Rect& domain);

/// Clipped Voronoi tessellation of `domain`; grain ids are 1-based seed
/// indices. Cells are convex by construction.
GrainSet voronoi_grains(const std::vector<Vec2>& seeds, const Rect& domain);

/// The true interface: every polygon edge shared by two grains, oriented so
/// the normal points from the lower grain id toward the higher.
struct InterfaceSegment {
  Vec2 a, b;
  Vec2 normal;
  int grain_minus, grain_plus;
};

std::vector<InterfaceSegment> shared_interface(const GrainSet& grains);

void write_grains(const GrainSet& g, const std::string& path);
GrainSet read_grains(const std::string& path);

}  // namespace sczm
