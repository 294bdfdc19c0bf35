#include <cmath>
#include <numbers>

#include "doctest.h"

#include "drumshape/functional.hpp"

using namespace drumshape;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kJ01 = 2.404825557695773;
}  // namespace

TEST_CASE("optimal dilation closed form") {
  const OptimalScale a = optimal_scale(kPi * kPi, 4.0);
  CHECK(a.t_star == Approx(std::cbrt(2 * kPi * kPi / 4)));
  CHECK(a.f_star == Approx(10.2150).epsilon(1e-4));
  const OptimalScale b = optimal_scale(2.0, 4.0);
  CHECK(b.t_star == Approx(1.0));
  CHECK(b.f_star == Approx(6.0));
  for (double a_ : {0.5, 1.0, 2.0, 3.5}) {
    const double n = 3.0;
    const double A = kPi * kPi * (a_ * a_ / (n * n) + n * n / (a_ * a_));
    const double B = 1.0 / a_ + a_;
    CHECK(optimal_scale(A, 2 * B).f_star == Approx(3 * std::cbrt(A) * std::pow(B, 2.0 / 3.0)).epsilon(1e-12));
    const OptimalScale scan = optimal_scale_scan(A, 2 * B);
    CHECK(scan.t_star == Approx(optimal_scale(A, 2 * B).t_star).epsilon(1e-6));
    CHECK(scan.f_star == Approx(optimal_scale(A, 2 * B).f_star).epsilon(1e-12));
  }
  CHECK_THROWS_AS(optimal_scale(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("functional value invariants") {
  const FunctionalValue v = make_functional_value(7.0, 3.0);
  CHECK(v.f == 10.0);
  CHECK(v.t_star == Approx(std::cbrt(14.0 / 3.0)));
  CHECK(v.f_star < v.f);
  const FunctionalValue w = make_functional_value(2.0, 4.0);
  CHECK(w.f_star == Approx(w.f));
}

TEST_CASE("evaluate on the special shapes") {
  const FunctionalValue sq = evaluate(axis_rectangle(0, 0, 1, 1), build_norm("p:1"));
  CHECK(sq.lambda == Approx(2 * kPi * kPi).epsilon(5e-3));
  CHECK(sq.perim == Approx(4.0));
  CHECK(sq.f == Approx(23.739).epsilon(5e-3));
  CHECK(sq.f_star == Approx(12.870).epsilon(5e-3));

  const FunctionalValue disc = evaluate(regular_polygon(256, 1.0), build_norm("p:2"));
  CHECK(disc.f_star == Approx(3 * std::pow(2.0, -2.0 / 3) * std::cbrt(kJ01 * kJ01) * std::pow(2 * kPi, 2.0 / 3))
                           .epsilon(5e-3));

  const FunctionalValue dia = evaluate(ConvexPolygon({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}), build_norm("p:1"));
  CHECK(dia.f_star == Approx(16.215).epsilon(5e-3));
  CHECK(dia.f_star > sq.f_star);
}

TEST_CASE("isoperimetric score") {
  CHECK(isoperimetric_score(regular_polygon(256, 1.0), build_norm("p:2")) == Approx(2 * std::sqrt(kPi)).epsilon(2e-3));
  CHECK(isoperimetric_score(axis_rectangle(0, 0, 1, 1), build_norm("p:1")) == Approx(4.0));
  CHECK(isoperimetric_score(ConvexPolygon({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}), build_norm("p:1")) ==
        Approx(8 / std::sqrt(2.0)));
}

TEST_CASE("a priori window holds the minimizer family") {
  const Norm n = build_norm("p:1");
  const double side = std::pow(kPi, 2.0 / 3.0);
  const ConvexPolygon best = axis_rectangle(0, 0, side, side);
  const AprioriWindow w = apriori_window(n, evaluate(best, n).f * 1.01);
  CHECK(w.contains(best));
  CHECK_FALSE(w.contains(axis_rectangle(0, 0, 20, 20)));
  CHECK_FALSE(w.contains(axis_rectangle(0, 0, 0.2, 0.2)));
}
