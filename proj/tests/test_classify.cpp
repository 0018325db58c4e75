#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sczm/classify.hpp"
#include "sczm/errors.hpp"
#include "sczm/grains.hpp"

using namespace sczm;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

GrainSet five_grain_rve() {
  const std::vector<Vec2> seeds = {{0.22, 0.24}, {0.78, 0.18}, {0.52, 0.52},
                                   {0.20, 0.80}, {0.80, 0.78}};
  return voronoi_grains(seeds, Rect{0, 0, 1, 1});
}

// exact segment-segment intersection used as the fast-reject oracle
bool segments_intersect(const Vector2d& p0, const Vector2d& p1, const Vector2d& q0,
                        const Vector2d& q1) {
  auto cross = [](const Vector2d& a, const Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); };
  const Vector2d r = p1 - p0, s = q1 - q0;
  const double rxs = cross(r, s);
  const double qpxr = cross(q0 - p0, r);
  if (rxs == 0) return false;  // parallel handled conservatively
  const double t = cross(q0 - p0, s) / rxs;
  const double u = qpxr / rxs;
  return t >= 0 && t <= 1 && u >= 0 && u <= 1;
}

}  // namespace

TEST_CASE("pca of a collinear cloud") {
  std::vector<Vector2d> pts;
  for (int i = 0; i <= 20; ++i) pts.emplace_back(i / 20.0, 0.0);
  const auto basis = compute_boundary_pca<2>(pts);
  CHECK(std::abs(basis.axes[1].y()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(basis.singular_values[0] > basis.singular_values[1]);
}

TEST_CASE("pca of a circle has near-equal singular values") {
  const auto circle = make_regular_polygon(256, {0.3, -0.1}, 1.0);
  const auto basis = compute_boundary_pca<2>(circle.vertices);
  CHECK(basis.singular_values[1] / basis.singular_values[0] > 0.95);
}

TEST_CASE("pca of the airfoil matches a covariance eigendecomposition") {
  const auto foil = make_airfoil(400);
  const auto basis = compute_boundary_pca<2>(foil.vertices);

  Vector2d mean = Vector2d::Zero();
  for (const auto& p : foil.vertices) mean += p;
  mean /= static_cast<double>(foil.vertices.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : foil.vertices) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const Vector2d major = eig.eigenvectors().col(1);  // ascending eigenvalues

  CHECK(std::abs(basis.axes[0].dot(major)) == doctest::Approx(1.0).epsilon(1e-9));
  // chord direction is x
  CHECK(std::abs(basis.axes[0].dot(Vector2d(1, 0))) > std::cos(15.0 * M_PI / 180.0));
}

TEST_CASE("pca rejects a coincident cloud") {
  std::vector<Vector2d> pts(5, Vector2d(1.0, 2.0));
  CHECK_THROWS_AS(compute_boundary_pca<2>(pts), DegenerateGeometryError);
}

TEST_CASE("index covers the unit square") {
  const auto square = make_polygon_boundary({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const auto basis = fixed_axis_basis<2>(square.vertices);
  const auto index = build_classifier_index<2>(basis, square);
  CHECK(index.hi[0] - index.lo[0] >= 1.0);
  CHECK(index.hi[1] - index.lo[1] >= 1.0);
  for (const auto& v : square.vertices) CHECK(index.obb_contains(v));
  // horizontal and vertical segments: the largest projection under ray axis
  // (0,1) is the unit horizontal span
  CHECK(index.l_max_projected == doctest::Approx(1.0));
}

TEST_CASE("projected centroid of a horizontal segment is its x-extent") {
  // doubled segment: watertight in the even-degree sense, empty interior
  BoundaryRep2 b;
  b.vertices = {{0.25, 0.5}, {0.75, 0.5}};
  b.facets = {{0, 1}, {1, 0}};
  const auto basis = fixed_axis_basis<2>(b.vertices);
  const auto index = build_classifier_index<2>(basis, b);
  const auto hits = collect_candidates<2>(Vector2d(0.5, 0.0), index);
  CHECK(hits.size() == 2);  // centroid x = 0.5 regardless of y
}

TEST_CASE("ray start placement") {
  const auto square = make_polygon_boundary({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  const auto basis = fixed_axis_basis<2>(square.vertices);
  const auto index = build_classifier_index<2>(basis, square);
  const double axis_len = index.hi[1] - index.lo[1];
  CHECK(axis_len == doctest::Approx(2.0).epsilon(1e-8));

  const Vector2d center = index.obb_center();
  const Vector2d start = generate_ray_start<2>(center, false, 1, index);
  // offset magnitude 1.1 x axis length beyond the corner plane
  CHECK(std::abs(start.y() - index.hi[1]) == doctest::Approx(1.1 * axis_len).epsilon(1e-8));

  const Vector2d inverted = generate_ray_start<2>(center, true, 1, index);
  CHECK(std::abs(inverted.y() + start.y()) < 1e-9);  // symmetric pair about the center

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(-0.999, 0.999);
  for (int i = 0; i < 1000; ++i) {
    const Vector2d p(unif(rng), unif(rng));
    for (bool inv : {false, true}) {
      const Vector2d s = generate_ray_start<2>(p, inv, 1, index);
      CHECK(!index.obb_contains(s));
    }
  }
}

TEST_CASE("fast reject basics") {
  const Vector2d o(0, 0), dir(1, 0);
  CHECK(!ray_region_fast_reject<2>(o, dir, Vector2d(0.5, 0.0), 0.1));
  CHECK(ray_region_fast_reject<2>(o, dir, Vector2d(0.5, 0.2), 0.1));
}

TEST_CASE("fast reject never discards a hit segment") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unif(-1, 1);
  int rejections = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Vector2d o(unif(rng), unif(rng));
    const Vector2d e(unif(rng), unif(rng));
    const Vector2d a(unif(rng), unif(rng));
    const Vector2d b(unif(rng), unif(rng));
    if ((e - o).norm() < 1e-6 || (b - a).norm() < 1e-6) continue;
    const Vector2d c = 0.5 * (a + b);
    const double r = 0.5 * (b - a).norm();
    if (ray_region_fast_reject<2>(o, e - o, c, r)) {
      ++rejections;
      CHECK(!segments_intersect(o, e, a, b));
    }
  }
  CHECK(rejections > 1000);  // the reject path is actually exercised
}

TEST_CASE("candidate collection") {
  const auto foil = make_airfoil(200);
  const auto basis = compute_boundary_pca<2>(foil.vertices);
  const auto index = build_classifier_index<2>(basis, foil);

  // far query: beyond every centroid by more than the search radius
  const Vector2d far = basis.mean + 50.0 * basis.axes[0];
  CHECK(collect_candidates<2>(far, index).empty());

  // a facet centroid always collects itself
  for (int f = 0; f < foil.num_facets(); f += 17) {
    const auto ids = collect_candidates<2>(foil.facet_centroid(f), index);
    CHECK(std::find(ids.begin(), ids.end(), f) != ids.end());
  }
}

TEST_CASE("candidate superset of ray hits") {
  const auto foil = make_airfoil(300);
  const auto basis = compute_boundary_pca<2>(foil.vertices);
  const auto index = build_classifier_index<2>(basis, foil);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ux(-0.2, 1.2), uy(-0.3, 0.3);
  for (int trial = 0; trial < 2000; ++trial) {
    const Vector2d p(ux(rng), uy(rng));
    if (!index.obb_contains(p)) continue;
    const Vector2d start = generate_ray_start<2>(p, false, 1, index);
    const auto cand = collect_candidates<2>(start, index);
    for (int f = 0; f < foil.num_facets(); ++f) {
      if (segments_intersect(start, p, foil.vertices[foil.facets[f][0]],
                             foil.vertices[foil.facets[f][1]])) {
        CHECK(std::find(cand.begin(), cand.end(), f) != cand.end());
      }
    }
  }
}

TEST_CASE("trace ray parity and ON detection") {
  const auto square = make_polygon_boundary({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const auto basis = fixed_axis_basis<2>(square.vertices);
  const auto index = build_classifier_index<2>(basis, square);

  const TraceResult in = trace_ray<2>(Vector2d(0.4, -3.0), Vector2d(0.4, 0.5), square, &index);
  CHECK(in.sideness == Sideness::In);
  CHECK(in.count == 1);

  const TraceResult through =
      trace_ray<2>(Vector2d(0.4, -3.0), Vector2d(0.4, 3.0), square, &index);
  CHECK(through.sideness == Sideness::Out);
  CHECK(through.count == 2);

  const TraceResult on = trace_ray<2>(Vector2d(0.4, -3.0), Vector2d(0.4, 0.0), square, &index);
  CHECK(on.sideness == Sideness::On);
}

TEST_CASE("classify point basics") {
  const auto circle = make_regular_polygon(64, {0, 0}, 1.0);
  const auto basis = compute_boundary_pca<2>(circle.vertices);
  const auto index = build_classifier_index<2>(basis, circle);

  ClassifyStats stats;
  CHECK(classify_point<2>(Vector2d(5, 5), circle, index, &stats) == Sideness::Out);
  CHECK(stats.rays_cast == 0);  // bounding-box rejection, no rays

  CHECK(classify_point<2>(Vector2d(0, 0), circle, index) == Sideness::In);
  CHECK(classify_brute_force<2>(Vector2d(0, 0), circle) == Sideness::In);
  CHECK(classify_point<2>(circle.vertices[5], circle, index) == Sideness::On);
}

TEST_CASE("oracle equivalence on three geometries") {
  std::vector<BoundaryRep2> geoms;
  geoms.push_back(make_regular_polygon(64, {0.5, 0.5}, 0.45));
  geoms.push_back(make_airfoil(240));
  for (const Grain& g : five_grain_rve().grains) geoms.push_back(make_polygon_boundary(g.polygon));

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> unif(-0.2, 1.2);
  for (const auto& geom : geoms) {
    const auto basis = compute_boundary_pca<2>(geom.vertices);
    const auto index = build_classifier_index<2>(basis, geom);
    int disagreements = 0;
    for (int i = 0; i < 10000; ++i) {
      const Vector2d p(unif(rng), unif(rng));
      const Sideness fast = classify_point<2>(p, geom, index);
      const Sideness brute = classify_brute_force<2>(p, geom);
      if (fast == Sideness::On || brute == Sideness::On) continue;
      if (fast != brute) ++disagreements;
    }
    CHECK(disagreements == 0);
  }
}

TEST_CASE("rotation equivariance") {
  const auto foil = make_airfoil(160);
  const Vector2d pivot(0.5, 0.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ux(-0.2, 1.2), uy(-0.4, 0.4);
  for (double angle : {0.35, 1.1}) {
    const auto rotated = rotate_boundary(foil, angle, pivot);
    const auto i0 = build_classifier_index<2>(compute_boundary_pca<2>(foil.vertices), foil);
    const auto i1 = build_classifier_index<2>(compute_boundary_pca<2>(rotated.vertices), rotated);
    const double c = std::cos(angle), s = std::sin(angle);
    for (int i = 0; i < 2000; ++i) {
      const Vector2d p(ux(rng), uy(rng));
      const Vector2d d = p - pivot;
      const Vector2d pr = pivot + Vector2d(c * d.x() - s * d.y(), s * d.x() + c * d.y());
      const Sideness a = classify_point<2>(p, foil, i0);
      const Sideness b = classify_point<2>(pr, rotated, i1);
      if (a == Sideness::On || b == Sideness::On) continue;
      CHECK(a == b);
    }
  }
}

TEST_CASE("opposed rays have matching parity") {
  const auto foil = make_airfoil(120);
  const auto basis = compute_boundary_pca<2>(foil.vertices);
  const auto index = build_classifier_index<2>(basis, foil);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ux(0.0, 1.0), uy(-0.1, 0.1);
  for (int i = 0; i < 3000; ++i) {
    const Vector2d p(ux(rng), uy(rng));
    if (!index.obb_contains(p)) continue;
    const auto r0 = trace_ray<2>(generate_ray_start<2>(p, false, 1, index), p, foil, &index);
    const auto r1 = trace_ray<2>(generate_ray_start<2>(p, true, 1, index), p, foil, &index);
    if (r0.sideness == Sideness::On || r1.sideness == Sideness::On) continue;
    CHECK(r0.count % 2 == r1.count % 2);
  }
}

TEST_CASE("inconsistent parities raise a diagnosable error") {
  // a square with a stray interior chord: parities along y disagree while
  // every horizontal ray still hits the shell
  BoundaryRep2 b;
  b.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.2, 0.5}, {0.8, 0.5}};
  b.facets = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}};
  const auto basis = fixed_axis_basis<2>(b.vertices);
  const auto index = build_classifier_index<2>(basis, b);
  CHECK_THROWS_AS(classify_point<2>(Vector2d(0.5, 0.25), b, index),
                  InconsistentClassificationError);
  try {
    classify_point<2>(Vector2d(0.5, 0.25), b, index);
  } catch (const InconsistentClassificationError& e) {
    CHECK(e.ray_counts.size() == 4);
  }
}

TEST_CASE("adaptive ray direction does not test more facets than fixed") {
  const auto foil = make_airfoil(200);
  const Vector2d pivot(0.5, 0.0);
  for (double deg : {0.0, 15.0, 30.0, 45.0}) {
    const auto geom = rotate_boundary(foil, deg * M_PI / 180.0, pivot);
    const auto pca_index =
        build_classifier_index<2>(compute_boundary_pca<2>(geom.vertices), geom);
    const auto fixed_index = build_classifier_index<2>(fixed_axis_basis<2>(geom.vertices), geom);
    ClassifyStats pca_stats, fixed_stats;
    for (int j = 0; j <= 64; ++j)
      for (int i = 0; i <= 64; ++i) {
        const Vector2d p(-0.25 + 1.5 * i / 64, -0.75 + 1.5 * j / 64);
        classify_point<2>(p, geom, pca_index, &pca_stats);
        classify_point<2>(p, geom, fixed_index, &fixed_stats);
      }
    CHECK(pca_stats.facet_tests <= fixed_stats.facet_tests);
  }
}

TEST_CASE("3d classification against a box") {
  const auto box = make_box_boundary(Vector3d(0, 0, 0), Vector3d(1, 2, 3));
  const auto basis = compute_boundary_pca<3>(box.vertices);
  const auto index = build_classifier_index<3>(basis, box);

  CHECK(classify_point<3>(Vector3d(0.5, 1.0, 1.5), box, index) == Sideness::In);
  CHECK(classify_point<3>(Vector3d(1.5, 1.0, 1.5), box, index) == Sideness::Out);
  CHECK(classify_point<3>(Vector3d(0.5, 1.0, 0.0), box, index) == Sideness::On);

  std::mt19937 rng(23);
  std::uniform_real_distribution<double> unif(-0.5, 3.5);
  int disagreements = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vector3d p(unif(rng), unif(rng), unif(rng));
    const Sideness fast = classify_point<3>(p, box, index);
    const Sideness brute = classify_brute_force<3>(p, box);
    if (fast == Sideness::On || brute == Sideness::On) continue;
    if (fast != brute) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("3d rays through shared box edges stay consistent") {
  const auto box = make_box_boundary(Vector3d(-1, -1, -1), Vector3d(1, 1, 1));
  const auto basis = fixed_axis_basis<3>(box.vertices);
  const auto index = build_classifier_index<3>(basis, box);
  // queries aligned with face diagonals exercise edge and vertex hits
  for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0})
    for (double y : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const Vector3d p(x, y, 0.25);
      const Sideness s = classify_point<3>(p, box, index);
      const bool on_shell = std::abs(x) == 1.0 || std::abs(y) == 1.0;
      CHECK(s == (on_shell ? Sideness::On : Sideness::In));
    }
}
