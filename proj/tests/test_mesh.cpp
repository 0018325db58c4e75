#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "sczm/errors.hpp"
#include "sczm/mesh.hpp"

using namespace sczm;

namespace {
const Rect kUnit{0, 0, 1, 1};
}

TEST_CASE("structured quad counts") {
  const Mesh m1 = build_structured_quad(1, 1, kUnit);
  CHECK(m1.num_elements() == 1);
  CHECK(m1.num_nodes() == 4);

  const Mesh m2 = build_structured_quad(2, 2, kUnit);
  CHECK(m2.num_elements() == 4);
  CHECK(m2.num_nodes() == 9);

  const Mesh m256 = build_structured_quad(256, 256, kUnit);
  CHECK(m256.element_area(0) == doctest::Approx(1.0 / (256.0 * 256.0)).epsilon(1e-14));
  const Vec2 side = m256.nodes[m256.elements[0].nodes[1]] - m256.nodes[m256.elements[0].nodes[0]];
  CHECK(side.norm() == doctest::Approx(1.0 / 256.0).epsilon(1e-14));
}

TEST_CASE("structured quad area partition") {
  const Mesh m = build_structured_quad(7, 5, Rect{-1.5, 0.25, 2.0, 3.0});
  CHECK(m.total_area() == doctest::Approx(3.5 * 2.75).epsilon(1e-12));
}

TEST_CASE("degenerate bounds rejected") {
  CHECK_THROWS_AS(build_structured_quad(2, 2, Rect{0, 0, 0, 1}), InvalidInputError);
  CHECK_THROWS_AS(build_crossed_tri(0, 2, kUnit), InvalidInputError);
}

TEST_CASE("crossed tri counts and area") {
  const Mesh m1 = build_crossed_tri(1, 1, kUnit);
  CHECK(m1.num_elements() == 4);
  CHECK(m1.num_nodes() == 5);

  const Mesh m2 = build_crossed_tri(2, 2, kUnit);
  CHECK(m2.num_elements() == 16);

  for (int nx : {1, 3, 5}) {
    const Mesh m = build_crossed_tri(nx, nx + 1, kUnit);
    CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("interior facet counts") {
  CHECK(interior_facets(build_structured_quad(1, 1, kUnit)).empty());
  CHECK(interior_facets(build_structured_quad(2, 1, kUnit)).size() == 1);
  CHECK(interior_facets(build_structured_quad(2, 2, kUnit)).size() == 4);
}

TEST_CASE("facet normals are unit and deterministic") {
  const Mesh a = build_crossed_tri(3, 3, kUnit);
  const Mesh b = build_crossed_tri(3, 3, kUnit);
  const auto fa = interior_facets(a);
  const auto fb = interior_facets(b);
  REQUIRE(fa.size() == fb.size());
  for (size_t i = 0; i < fa.size(); ++i) {
    CHECK(fa[i].normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fa[i].n0 == fb[i].n0);
    CHECK(fa[i].n1 == fb[i].n1);
    CHECK(fa[i].normal.x() == fb[i].normal.x());
    CHECK(fa[i].normal.y() == fb[i].normal.y());
    CHECK(fa[i].minus_element == fb[i].minus_element);
  }
}

TEST_CASE("facet normal points from lower to higher region") {
  Mesh m = build_structured_quad(2, 1, kUnit);
  m.region_id = {1, 2};
  const auto facets = interior_facets(m);
  REQUIRE(facets.size() == 1);
  CHECK(m.region_id[facets[0].minus_element] == 1);
  CHECK(m.region_id[facets[0].plus_element] == 2);
  CHECK(facets[0].normal.x() == doctest::Approx(1.0));
}

TEST_CASE("boundary tags lie on the boundary") {
  const Mesh m = build_structured_quad(4, 3, Rect{0, 0, 2, 1});
  for (int n : m.boundary_tags.at("left")) CHECK(std::abs(m.nodes[n].x()) < 1e-12);
  for (int n : m.boundary_tags.at("right")) CHECK(std::abs(m.nodes[n].x() - 2.0) < 1e-12);
  for (int n : m.boundary_tags.at("bottom")) CHECK(std::abs(m.nodes[n].y()) < 1e-12);
  for (int n : m.boundary_tags.at("top")) CHECK(std::abs(m.nodes[n].y() - 1.0) < 1e-12);
  CHECK(m.boundary_tags.at("left").size() == 4);
}

TEST_CASE("split fitted interface duplicates seam nodes") {
  const Mesh m2 = build_structured_quad(2, 2, kUnit);
  const SplitMesh s2 = split_fitted_interface(m2, Segment2{{0.5, 0.0}, {0.5, 1.0}});
  CHECK(s2.mesh.num_nodes() == m2.num_nodes() + 3);
  CHECK(s2.seams.size() == 2);
  CHECK(count_connected_components(s2.mesh) == 2);

  const Mesh m4 = build_structured_quad(4, 4, kUnit);
  const SplitMesh s4 = split_fitted_interface(m4, Segment2{{0.5, 0.0}, {0.5, 1.0}});
  CHECK(s4.mesh.num_nodes() == m4.num_nodes() + 5);
}

TEST_CASE("misaligned interface rejected") {
  const Mesh m = build_structured_quad(3, 3, kUnit);
  CHECK_THROWS_AS(split_fitted_interface(m, Segment2{{0.5, 0.0}, {0.5, 1.0}}), InvalidInputError);
}

TEST_CASE("characteristic size") {
  CHECK(characteristic_size(build_structured_quad(8, 8, kUnit)) == doctest::Approx(0.125));
  CHECK(characteristic_size(build_structured_quad(2, 2, kUnit)) == doctest::Approx(0.5));
  // 4 * 17 * 7 = 476 elements on the unit square
  const Mesh m = build_crossed_tri(17, 7, kUnit);
  CHECK(m.num_elements() == 476);
  CHECK(characteristic_size(m) == doctest::Approx(4.583492e-2).epsilon(1e-6));
  Mesh empty;
  CHECK_THROWS_AS(characteristic_size(empty), InvalidInputError);
}

TEST_CASE("non-manifold facet detected") {
  Mesh m = build_structured_quad(2, 1, kUnit);
  m.elements.push_back(m.elements[0]);
  m.region_id.push_back(1);
  CHECK_THROWS_AS(interior_facets(m), TopologyError);
}

TEST_CASE("mesh file round trip") {
  Mesh m = build_crossed_tri(3, 2, Rect{0, 0, 2, 1});
  m.region_id[5] = 7;
  const std::string path = (std::filesystem::temp_directory_path() / "sczm_mesh_rt.txt").string();
  write_mesh(m, path);
  const Mesh r = read_mesh(path);
  REQUIRE(r.num_nodes() == m.num_nodes());
  REQUIRE(r.num_elements() == m.num_elements());
  for (int i = 0; i < m.num_nodes(); ++i) {
    CHECK(r.nodes[i].x() == m.nodes[i].x());
    CHECK(r.nodes[i].y() == m.nodes[i].y());
  }
  CHECK(r.region_id[5] == 7);
  std::remove(path.c_str());
}

TEST_CASE("field file round trip") {
  NodalField f;
  f.name = "displacement";
  f.components = 2;
  f.values = {0.0, 1.5e-17, -2.25, 3.0, 0.1234567890123456, -1.0};
  const std::string path = (std::filesystem::temp_directory_path() / "sczm_field_rt.txt").string();
  write_field(f, path);
  const NodalField r = read_field(path);
  REQUIRE(r.values.size() == f.values.size());
  for (size_t i = 0; i < f.values.size(); ++i) CHECK(r.values[i] == f.values[i]);
  std::remove(path.c_str());
}
