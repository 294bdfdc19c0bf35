#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "drumshape/optimizer.hpp"

using namespace drumshape;
using doctest::Approx;

TEST_CASE("config validation") {
  OptimizerConfig c;
  CHECK_NOTHROW(c.validate());
  c.k_angles = 6;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.tol_f = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("perimeter gradient is exact on the cone") {
  const Norm n = build_norm("p:4");
  const int k = 32;
  const auto g = perimeter_gradient(n, k);
  std::mt19937_64 rng(4);
  const SupportVector s = support_vector_of(random_convex_polygon(rng, 9, 1.0), k);
  // P is linear in h on the cone
  double dot_ = 0;
  for (int i = 0; i < k; ++i) dot_ += g[static_cast<std::size_t>(i)] * s[i];
  CHECK(dot_ == Approx(perimeter(polygon_from_support(s), n)).epsilon(1e-9));
  // and bevels inside an additivity cone cost nothing under l1
  const auto g1 = perimeter_gradient(build_norm("p:1"), k);
  CHECK(g1[1] == Approx(0.0).scale(1.0));
  CHECK(g1[0] > 0.0);
}

TEST_CASE("dilation consistency of the assembled gradient") {
  SupportVector disc{std::vector<double>(64, 1.0)};
  const GradientCheckReport r = gradient_check(build_norm("p:2"), disc, {0, 5}, 96);
  CHECK(r.dilation_rel_error < 0.05);
}

TEST_CASE("initial supports lie in the cone") {
  OptimizerConfig c;
  c.k_angles = 48;
  c.n_starts = 4;
  const auto starts = initial_supports(build_norm("wl1:1/3,3"), c);
  REQUIRE(starts.size() == 4);
  for (const SupportVector& s : starts) {
    CHECK(s.k() == 48);
    CHECK(s.in_cone(1e-9));
  }
}

TEST_CASE("descent is monotone within a level and ends feasible") {
  OptimizerConfig c;
  c.k_angles = 32;
  c.max_iters = 40;
  c.n_starts = 1;
  const Norm n = build_norm("p:1");
  const auto starts = initial_supports(n, c);
  const OptimizationTrace t = run_start(n, c, starts[0], 0, "isoperimetric");
  REQUIRE(t.iterates.size() >= 2);
  for (std::size_t i = 1; i < t.iterates.size(); ++i)
    if (t.iterates[i].level == t.iterates[i - 1].level)
      CHECK(t.iterates[i].value.f_star <= t.iterates[i - 1].value.f_star * (1 + 1e-12));
  CHECK(contains_strictly(t.final_shape, {0, 0}));
  CHECK(t.final_value.t_star == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("status names") {
  CHECK(to_string(OptimizationStatus::converged) == "converged");
  CHECK(to_string(OptimizationStatus::stalled) == "stalled");
}
