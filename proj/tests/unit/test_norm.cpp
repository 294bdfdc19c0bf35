#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "drumshape/norm.hpp"
#include "drumshape/wulff.hpp"

using namespace drumshape;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

const char* const kBattery[] = {"p:1", "p:2", "p:inf", "p:4", "wl1:1/3,3", "sum:1*(p:1)+1*(rot:pi/4:(p:1))",
                                "poly:(2,0);(1,1);(-1,1);(-2,0);(-1,-1);(1,-1)"};
}  // namespace

TEST_CASE("build_norm and eval on hand values") {
  CHECK(build_norm("p:1")({3, 4}) == Approx(7.0));
  CHECK(build_norm("p:2")({3, 4}) == Approx(5.0));
  CHECK(build_norm("wl1:1/3,3")({1, 1}) == Approx(10.0 / 3.0));
  CHECK(build_norm("p:inf")({2, -5}) == Approx(5.0));
  CHECK(build_norm("rot:pi/2:(p:1)")({1, 0}) == Approx(1.0));
  CHECK(build_norm("sum:1*(p:1)+1*(p:2)")({1, 0}) == Approx(2.0));
  CHECK_THROWS_AS(build_norm("p:0.5"), std::invalid_argument);
  CHECK_THROWS_AS(build_norm("bogus"), std::invalid_argument);
  CHECK_THROWS_AS(build_norm("poly:(1,0);(0,1);(-1,0)"), std::invalid_argument);
}

TEST_CASE("norm axioms on the battery") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (const char* spec : kBattery) {
    CAPTURE(spec);
    const Norm n = build_norm(spec);
    CHECK(n({0, 0}) == 0.0);
    for (int i = 0; i < 200; ++i) {
      const Vec2 x{g(rng), g(rng)};
      const Vec2 y{g(rng), g(rng)};
      const double t = g(rng) * 3.0;
      CHECK(n(x) > 0.0);
      CHECK(n(t * x) == Approx(std::abs(t) * n(x)).epsilon(1e-12));
      CHECK(n(x + y) <= n(x) + n(y) + 1e-12);
      CHECK(n(-1.0 * x) == n(x));
    }
  }
}

TEST_CASE("one-sided derivatives") {
  const NormProbe l1 = one_sided_derivatives(build_norm("p:1"), {1, 0});
  CHECK(l1.theta_minus == Approx(-1.0));
  CHECK(l1.theta_plus == Approx(1.0));
  const NormProbe l2 = one_sided_derivatives(build_norm("p:2"), unit_at(0.7));
  CHECK(l2.theta_minus == Approx(0.0).epsilon(1e-9).scale(1.0));
  CHECK(l2.theta_plus == Approx(0.0).epsilon(1e-9).scale(1.0));
  const NormProbe w = one_sided_derivatives(build_norm("wl1:1/3,3"), {1, 0});
  CHECK(w.theta_minus == Approx(-3.0));
  CHECK(w.theta_plus == Approx(3.0));

  // bounds and the analytic path against difference quotients
  std::mt19937_64 rng(3);
  for (const char* spec : kBattery) {
    CAPTURE(spec);
    const Norm n = build_norm(spec);
    for (int i = 0; i < 50; ++i) {
      const Vec2 e = unit_at(uniform(rng, 0.0, 2.0 * kPi));
      const NormProbe p = one_sided_derivatives(n, e);
      const NormProbe q = one_sided_derivatives_numeric(n, e);
      CHECK(-n(p.e_perp) - 1e-12 <= p.theta_minus);
      CHECK(p.theta_minus <= p.theta_plus + 1e-12);
      CHECK(p.theta_plus <= n(p.e_perp) + 1e-12);
      CHECK(p.theta_minus == Approx(q.theta_minus).epsilon(1e-5).scale(1.0));
      CHECK(p.theta_plus == Approx(q.theta_plus).epsilon(1e-5).scale(1.0));
      // theta+(e, -e') = -theta-(e, e'): probing along -e_perp swaps the sides
      const NormProbe r = one_sided_derivatives(n, -1.0 * e);
      CHECK(r.gap() == Approx(p.gap()).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("degeneracy and additivity") {
  CHECK(is_degenerate(build_norm("p:1"), {1, 0}));
  CHECK_FALSE(is_degenerate(build_norm("p:1"), normalized(Vec2{1, 1})));
  CHECK_FALSE(is_degenerate(build_norm("p:2"), {1, 0}));

  CHECK(additivity_on_pair(build_norm("p:inf"), normalized(Vec2{1, 1}), normalized(Vec2{-1, 1})));
  CHECK(additivity_on_pair(build_norm("p:1"), {1, 0}, {0, 1}));
  CHECK_FALSE(additivity_on_pair(build_norm("p:2"), {1, 0}, normalized(Vec2{1, 2})));
  CHECK_FALSE(additivity_on_pair(build_norm("p:4"), {1, 0}, {0, 1}));
}

TEST_CASE("degenerate direction scan") {
  const auto l1 = degenerate_directions(build_norm("p:1"));
  REQUIRE(l1.size() == 2);
  CHECK(l1[0].angle == Approx(0.0).scale(1.0));
  CHECK(l1[1].angle == Approx(kPi / 2));
  CHECK(degenerate_directions(build_norm("p:2")).empty());
  CHECK(degenerate_directions(build_norm("p:4")).empty());

  const auto w = degenerate_directions(build_norm("wl1:1/3,3"));
  REQUIRE(w.size() == 2);
  CHECK(w[0].gap == Approx(6.0));
  CHECK(w[1].gap == Approx(2.0 / 3.0));

  // rotated copies add their kinks: four directions, pi/4 apart
  const auto s = degenerate_directions(build_norm("sum:1*(p:1)+1*(rot:pi/4:(p:1))"));
  REQUIRE(s.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(s[i].angle == Approx(kPi / 4 * static_cast<double>(i)).scale(1.0));
}

TEST_CASE("additivity cones follow the flat edges of the unit ball") {
  CHECK(additivity_cones(build_norm("p:2")).empty());
  CHECK(additivity_cones(build_norm("p:4")).empty());
  const auto l1 = additivity_cones(build_norm("p:1"));
  REQUIRE(l1.size() == 4);
  for (const auto& c : l1) CHECK(c.width() == Approx(kPi / 2).epsilon(1e-6));
  const auto linf = additivity_cones(build_norm("p:inf"));
  REQUIRE(linf.size() == 4);
  CHECK(linf[0].from == Approx(kPi / 4).epsilon(1e-6));
}

TEST_CASE("Wulff shapes") {
  const ConvexPolygon disc = wulff_shape(build_norm("p:2"), 256);
  for (const Vec2& v : disc.vertices()) CHECK(norm2(v) <= 1.0 + 1e-3);
  CHECK(area(disc) == Approx(kPi).epsilon(1e-3));

  const ConvexPolygon sq = wulff_shape(build_norm("p:1"));
  CHECK(sq.size() == 4);
  CHECK(hausdorff_distance(sq, axis_rectangle(-1, -1, 1, 1)) < 1e-9);

  const ConvexPolygon diamond = wulff_shape(build_norm("p:inf"));
  CHECK(diamond.size() == 4);
  CHECK(hausdorff_distance(diamond, ConvexPolygon({{1, 0}, {0, 1}, {-1, 0}, {0, -1}})) < 1e-9);

  // the isoperimetric shape is the Wulff shape turned by a quarter
  const Norm w = build_norm("wl1:1/3,3");
  CHECK(hausdorff_distance(isoperimetric_shape(w), rotate(wulff_shape(w), kPi / 2)) < 1e-9);
}

TEST_CASE("unit circle extremes") {
  CHECK(min_on_unit_circle(build_norm("p:1")) == Approx(1.0));
  CHECK(max_on_unit_circle(build_norm("p:1")) == Approx(std::sqrt(2.0)).epsilon(1e-6));
}
