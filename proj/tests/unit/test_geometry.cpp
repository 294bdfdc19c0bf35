#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "drumshape/geometry.hpp"
#include "drumshape/norm.hpp"

using namespace drumshape;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
const ConvexPolygon kUnitSquare = axis_rectangle(0, 0, 1, 1);
const ConvexPolygon kDiamond({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
}  // namespace

TEST_CASE("canonical form") {
  const ConvexPolygon p({{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0.5, 0}});  // clockwise, with a collinear vertex
  CHECK(p.size() == 4);
  CHECK(area(p) == Approx(1.0));
  const auto& v = p.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[(i + 1) % v.size()] - v[i];
    const Vec2 b = v[(i + 2) % v.size()] - v[(i + 1) % v.size()];
    CHECK(cross(a, b) > 0.0);
  }
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {2, 0}, {1, 0.2}, {1, 2}}), std::invalid_argument);
}

TEST_CASE("convex hull") {
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  CHECK(hausdorff_distance(convex_hull(pts), kUnitSquare) < 1e-15);
  const std::vector<Vec2> tri{{0, 0}, {1, 0}, {0, 1}, {1.0 / 3, 1.0 / 3}};
  CHECK(convex_hull(tri).size() == 3);

  // hull perimeter never exceeds the closed polyline through the points
  std::mt19937_64 rng(11);
  std::vector<Vec2> cloud;
  for (int i = 0; i < 1000; ++i) {
    const double r = std::sqrt(uniform01(rng));
    cloud.push_back(r * unit_at(uniform(rng, 0, 2 * kPi)));
  }
  const ConvexPolygon hull = convex_hull(cloud);
  for (const char* spec : {"p:1", "p:2", "p:inf", "wl1:1/3,3"}) {
    const Norm n = build_norm(spec);
    double polyline = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) polyline += n(cloud[(i + 1) % cloud.size()] - cloud[i]);
    CHECK(perimeter(hull, n) <= polyline);
  }
}

TEST_CASE("Minkowski sums") {
  CHECK(hausdorff_distance(minkowski_sum(kUnitSquare, kUnitSquare), axis_rectangle(0, 0, 2, 2)) < 1e-15);
  CHECK(minkowski_sum(axis_rectangle(-0.5, -0.5, 0.5, 0.5), kDiamond).size() == 8);
  // support functions add
  std::mt19937_64 rng(5);
  const ConvexPolygon p = random_convex_polygon(rng, 9, 1.0);
  const ConvexPolygon q = random_convex_polygon(rng, 6, 2.0);
  const ConvexPolygon s = minkowski_sum(p, q);
  for (int i = 0; i < 50; ++i) {
    const Vec2 u = unit_at(uniform(rng, 0, 2 * kPi));
    CHECK(support_function(s, u) == Approx(support_function(p, u) + support_function(q, u)).epsilon(1e-12));
  }
}

TEST_CASE("perimeter and area") {
  CHECK(perimeter(kUnitSquare, build_norm("p:1")) == Approx(4.0));
  CHECK(perimeter(kUnitSquare, build_norm("p:2")) == Approx(4.0));
  CHECK(perimeter(kDiamond, build_norm("p:1")) == Approx(8.0));
  CHECK(euclidean_perimeter(kDiamond) == Approx(4.0 * std::sqrt(2.0)));
  CHECK(area(kUnitSquare) == Approx(1.0));
  CHECK(area(kDiamond) == Approx(2.0));
  CHECK(area(regular_polygon(256, 1.0)) == Approx(kPi).epsilon(1e-3));
}

TEST_CASE("support function and Hausdorff distance") {
  const ConvexPolygon sq = axis_rectangle(-1, -1, 1, 1);
  CHECK(support_function(sq, {1, 0}) == Approx(1.0));
  CHECK(support_function(sq, normalized(Vec2{1, 1})) == Approx(std::sqrt(2.0)));
  std::mt19937_64 rng(2);
  const ConvexPolygon p = random_convex_polygon(rng, 8, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vec2 u = unit_at(uniform(rng, 0, 2 * kPi));
    CHECK(support_function(p, u) + support_function(p, -1.0 * u) >= 0.0);
  }
  CHECK(hausdorff_distance(kUnitSquare, translate(kUnitSquare, {0.3, 0})) == Approx(0.3));
  CHECK(hausdorff_distance(sq, axis_rectangle(-2, -2, 2, 2)) == Approx(std::sqrt(2.0)));
  CHECK(hausdorff_distance(p, p) == 0.0);
}

TEST_CASE("scaling and centering") {
  const ConvexPolygon big = scale_translate(kUnitSquare, 2.0, {0, 0});
  CHECK(perimeter(big, build_norm("wl1:1/3,3")) == Approx(2.0 * perimeter(kUnitSquare, build_norm("wl1:1/3,3"))));
  CHECK(hausdorff_distance(scale_translate(kDiamond, 1.0, {0, 0}), kDiamond) == 0.0);
  CHECK(area(scale_translate(kDiamond, 3.0, {0, 0})) == Approx(18.0));
  CHECK_THROWS_AS(scale_translate(kDiamond, 0.0, {0, 0}), std::invalid_argument);

  const CenteredPolygon c = center(axis_rectangle(0, 0, 2, 2));
  CHECK(hausdorff_distance(c.polygon, axis_rectangle(-1, -1, 1, 1)) < 1e-15);
  CHECK(center(axis_rectangle(-1, -1, 1, 1), CenterMode::symmetrize).asymmetry_defect == Approx(0.0).scale(1.0));
  const ConvexPolygon tri({{0, 0}, {1, 0}, {0, 1}});
  CHECK(center(tri, CenterMode::symmetrize).asymmetry_defect > 0.1);
}

TEST_CASE("support vectors") {
  const ConvexPolygon sq = polygon_from_support(SupportVector{{1, 1, 1, 1}});
  CHECK(hausdorff_distance(sq, axis_rectangle(-1, -1, 1, 1)) < 1e-12);

  const ConvexPolygon disc = polygon_from_support(SupportVector{std::vector<double>(64, 1.0)});
  CHECK(disc.size() == 64);
  CHECK(contains_strictly(disc, {0, 0}));
  CHECK(area(disc) == Approx(kPi).epsilon(2e-3));

  // an index pushed beyond the cone is not a face: round trip changes it
  SupportVector bad{std::vector<double>(8, 1.0)};
  bad.values[3] = 1.5;
  CHECK_FALSE(bad.in_cone());
  const SupportVector back = support_vector_of(polygon_from_support(bad), 8);
  CHECK(back[3] < 1.5 - 1e-3);

  // projection reaches the cone and leaves feasible vectors alone
  project_to_cone(bad);
  CHECK(bad.in_cone(1e-12));
  std::mt19937_64 rng(1);
  const SupportVector ok = support_vector_of(random_convex_polygon(rng, 7, 1.0), 64);
  SupportVector copy = ok;
  CHECK(ok.in_cone(1e-9));
  project_to_cone(copy);
  for (int k = 0; k < 64; ++k) CHECK(copy[k] == Approx(ok[k]).epsilon(1e-9));
}

TEST_CASE("sandwich epsilon") {
  const ConvexPolygon u = regular_polygon(256, 1.0);
  CHECK(sandwich_epsilon(u, scale_translate(u, 1.1, {0, 0})) == Approx(0.1).epsilon(1e-9));
  CHECK(sandwich_epsilon(u, u) == Approx(0.0).scale(1.0));
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const ConvexPolygon a = center(random_convex_polygon(rng, 8, 1.0)).polygon;
    const ConvexPolygon b = center(random_convex_polygon(rng, 8, 1.0)).polygon;
    if (!contains_strictly(a, {0, 0})) continue;
    CHECK(sandwich_epsilon(a, b) <= hausdorff_distance(a, b) / distance_to_boundary(a, {0, 0}) + 1e-9);
  }
}
