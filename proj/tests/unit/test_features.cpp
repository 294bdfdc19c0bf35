#include <cmath>
#include <numbers>

#include "doctest.h"

#include "drumshape/features.hpp"
#include "drumshape/spectral.hpp"

using namespace drumshape;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
const ConvexPolygon kUnitSquare = axis_rectangle(0, 0, 1, 1);
const ConvexPolygon kDiamond({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});

ConvexPolygon ellipse(double a, double b, int n) {
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) v.push_back({a * std::cos(2 * kPi * i / n), b * std::sin(2 * kPi * i / n)});
  return ConvexPolygon(v);
}
}  // namespace

TEST_CASE("facet detection") {
  const auto sq = detect_facets(kUnitSquare);
  REQUIRE(sq.size() == 4);
  for (const Facet& f : sq) {
    CHECK(f.length == Approx(1.0));
    CHECK(norm2(f.direction) == Approx(1.0));
  }
  CHECK(detect_facets(regular_polygon(64, 1.0)).empty());
  const auto rect = detect_facets(axis_rectangle(0, 0, 3, 1.0 / 3));
  REQUIRE(rect.size() == 4);
  int long_ones = 0;
  for (const Facet& f : rect) {
    if (std::abs(f.direction.y) < 1e-12) {
      CHECK(f.length == Approx(3.0));
      ++long_ones;
    } else {
      CHECK(f.length == Approx(1.0 / 3));
    }
  }
  CHECK(long_ones == 2);
}

TEST_CASE("corner detection") {
  const auto sq = detect_corners(kUnitSquare);
  REQUIRE(sq.size() == 4);
  for (const Corner& c : sq) CHECK(c.turning == Approx(kPi / 2));
  CHECK(detect_corners(regular_polygon(64, 1.0)).empty());
  const auto d = detect_corners(kDiamond);
  REQUIRE(d.size() == 4);
  for (const Corner& c : d) {
    CHECK(std::abs(c.v_minus.x) == Approx(std::sqrt(0.5)));
    CHECK(std::abs(c.v_plus.y) == Approx(std::sqrt(0.5)));
  }
}

TEST_CASE("feature theorems on the closed-form minimizers") {
  const ConvexPolygon sq = axis_rectangle(-1, -1, 1, 1);
  const FeatureReport l1 = analyze_features(build_norm("p:1"), sq);
  CHECK(l1.passed());
  CHECK(l1.facet_matches.size() == 4);

  const FeatureReport l2 = analyze_features(build_norm("p:2"), regular_polygon(128, 1.0));
  CHECK(l2.passed());
  CHECK(l2.facets.empty());
  CHECK(l2.corners.empty());

  const FeatureReport linf = analyze_features(build_norm("p:inf"), kDiamond);
  CHECK(linf.passed());
  REQUIRE(linf.corner_matches.size() == 4);
  for (const CornerMatch& m : linf.corner_matches) CHECK(m.additive);

  // a square under the Euclidean norm breaks both theorems
  const FeatureReport bad = analyze_features(build_norm("p:2"), sq);
  CHECK_FALSE(bad.facet_violations.empty());
  CHECK_FALSE(bad.corner_violations.empty());
  // a disc under l1 has no facet for either degenerate direction
  const FeatureReport missing = verify_facet_theorem(build_norm("p:1"), regular_polygon(128, 1.0));
  CHECK(missing.facet_violations.size() == 2);
}

TEST_CASE("corner symmetry") {
  CHECK(unpaired_corners(axis_rectangle(-1, -1, 1, 1)) == 0);
  CHECK(unpaired_corners(center(ConvexPolygon({{0, 0}, {1, 0}, {0, 1}})).polygon) == 3);
}

TEST_CASE("optimality residual") {
  const FeatureTolerances tol;
  const ConvexPolygon disc = regular_polygon(128, 1.0);
  const EigenSolution e = solve_dirichlet(disc, spacing_for(disc, 64));
  CHECK(optimality_residual(build_norm("p:2"), disc, e).coefficient_of_variation < 0.05);

  const ConvexPolygon ell = ellipse(1.4, 0.7, 128);
  const EigenSolution f = solve_dirichlet(ell, spacing_for(ell, 64));
  CHECK(optimality_residual(build_norm("p:2"), ell, f).coefficient_of_variation > 0.2);

  CHECK_THROWS_AS(optimality_residual(build_norm("p:1"), disc, e), std::invalid_argument);
  const EigenSolution g = solve_dirichlet(kUnitSquare, 1.0 / 32);
  CHECK_THROWS_AS(optimality_residual(build_norm("p:2"), kUnitSquare, g), std::invalid_argument);
  (void)tol;
}

TEST_CASE("Minkowski pairs") {
  const ConvexPolygon sq = axis_rectangle(-1, -1, 1, 1);
  const MinkowskiPairResult mixed = minkowski_pair(sq, regular_polygon(64, 1.0), false);
  CHECK(mixed.convexity_slack[1] > 0.0);
  CHECK(mixed.passed());
  const MinkowskiPairResult homo = minkowski_pair(sq, scale_translate(sq, 2.0, {0.3, 0.1}), true);
  // homothetic: lambda follows the dilation exactly and Brunn-Minkowski is tight
  CHECK(homo.strict);
  CHECK(std::abs(homo.brunn_minkowski_margin) < 1e-3);
  CHECK(homo.passed());
  const MinkowskiPairResult diam = minkowski_pair(sq, kDiamond, false);
  CHECK(diam.perimeter_rel_error <= 1e-12);

  const MinkowskiReport r = minkowski_suite(3, 5);
  CHECK(r.passed == 5);
}

TEST_CASE("asymmetric rectangle family") {
  const RectangleReport r = counterexample_rectangles(3.0, {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}, false);
  REQUIRE(r.rows.size() == 6);
  CHECK(r.rows[1].f_star == Approx(3 * std::cbrt(kPi * kPi * (1.0 / 9 + 9)) * std::pow(2.0, 2.0 / 3)).epsilon(1e-12));
  CHECK(r.rows[1].f_star == Approx(21.32).epsilon(1e-3));
  CHECK(r.rows[3].f_star == Approx(16.49).epsilon(1e-3));
  CHECK(r.argmin_away_from_one);

  const RectangleReport sym = counterexample_rectangles(1.0, {0.5, 0.75, 1.0, 1.5, 2.0}, false);
  CHECK(sym.rows[sym.argmin].a == 1.0);
  CHECK_FALSE(sym.argmin_away_from_one);

  const RectangleReport checked = counterexample_rectangles(3.0, {1.0, 2.0}, true);
  CHECK(checked.max_lambda_rel_error < 5e-3);
}

TEST_CASE("perimeter right derivative on a facet") {
  const ConvexPolygon sq = axis_rectangle(0, 0, 1, 1);
  const Facet* bottom = nullptr;
  const auto facets = detect_facets(sq);
  for (const Facet& f : facets)
    if (std::abs(f.direction.y) < 1e-12 && f.start.y < 0.5) bottom = &f;
  REQUIRE(bottom != nullptr);
  const PerimeterDerivativeReport l1 = perimeter_derivative_check(build_norm("p:1"), sq, *bottom);
  CHECK(l1.predicted == Approx(2.0));
  CHECK(l1.passed);
  const PerimeterDerivativeReport l2 = perimeter_derivative_check(build_norm("p:2"), sq, *bottom);
  CHECK(l2.predicted == Approx(0.0).scale(1.0));
  CHECK(std::abs(l2.extrapolated) < 1e-3);
  const PerimeterDerivativeReport w = perimeter_derivative_check(build_norm("wl1:1/3,3"), sq, *bottom);
  CHECK(w.predicted == Approx(3.0 * w.bump_variation));
  CHECK(w.passed);
}
