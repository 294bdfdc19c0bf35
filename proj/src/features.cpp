#include "drumshape/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace drumshape {

namespace {

constexpr double kPi = std::numbers::pi;

double turning_at(const ConvexPolygon& p, std::size_t i) {
  const Vec2 in = p.edge(i + p.size() - 1);
  const Vec2 out = p.edge(i);
  return std::atan2(cross(in, out), dot(in, out));
}

// angle of a direction modulo pi, in [0, pi)
double line_angle(const Vec2& v) {
  double a = std::atan2(v.y, v.x);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

double line_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kPi);
  return std::min(d, kPi - d);
}

bool angle_in_cone(double angle, const AdditivityCone& c, double slack) {
  double a = wrap_angle(angle - c.from + slack);
  return a <= c.width() + 2.0 * slack;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::vector<Facet> detect_facets(const ConvexPolygon& p, double facet_tol, double angle_merge_tol) {
  const std::size_t n = p.size();
  // start at an edge that does not continue its predecessor
  std::size_t start = 0;
  bool found = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (turning_at(p, i) >= angle_merge_tol) {
      start = i;
      found = true;
      break;
    }
  }
  if (!found) return {};
  const double diam = diameter(p);
  std::vector<Facet> out;
  std::size_t i = 0;
  while (i < n) {
    const std::size_t first = (start + i) % n;
    Vec2 sum = p.edge(first);
    std::size_t count = 1;
    while (i + count < n && turning_at(p, (start + i + count) % n) < angle_merge_tol) {
      sum = sum + p.edge((start + i + count) % n);
      ++count;
    }
    const double len = norm2(sum);
    if (len > facet_tol * diam) {
      Facet f;
      f.direction = unit_at(line_angle(sum));
      f.length = len;
      f.start = p.vertex(first);
      f.end = p.vertex(first + count);
      f.first_edge = first;
      f.edge_count = count;
      out.push_back(f);
    }
    i += count;
  }
  std::sort(out.begin(), out.end(), [](const Facet& a, const Facet& b) { return a.first_edge < b.first_edge; });
  return out;
}

std::vector<Corner> detect_corners(const ConvexPolygon& p, double corner_tol) {
  std::vector<Corner> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = turning_at(p, i);
    if (t <= corner_tol) continue;
    Corner c;
    c.point = p[i];
    c.v_minus = normalized(p.edge(i + p.size() - 1));
    c.v_plus = normalized(p.edge(i));
    c.turning = t;
    c.vertex = i;
    out.push_back(c);
  }
  return out;
}

FeatureReport verify_facet_theorem(const Norm& norm, const ConvexPolygon& p, const FeatureTolerances& tol) {
  FeatureReport r;
  r.facets = detect_facets(p, tol.facet_tol, tol.angle_merge_tol);
  r.degenerate_dirs = degenerate_directions(norm, tol.degenerate_angles);
  std::vector<bool> dir_hit(r.degenerate_dirs.size(), false);
  for (std::size_t i = 0; i < r.facets.size(); ++i) {
    const double a = line_angle(r.facets[i].direction);
    double best = kPi;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < r.degenerate_dirs.size(); ++j) {
      const double d = line_distance(a, r.degenerate_dirs[j].angle);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    if (best < tol.match_tol) {
      r.facet_matches.push_back({i, arg, best});
      dir_hit[arg] = true;
    } else {
      r.facet_violations.push_back("facet at angle " + fmt(a) + " has no degenerate direction");
    }
  }
  for (std::size_t j = 0; j < r.degenerate_dirs.size(); ++j) {
    if (dir_hit[j]) continue;
    // a degenerate direction may also be matched by a facet that was paired elsewhere
    bool near = false;
    for (const auto& f : r.facets)
      if (line_distance(line_angle(f.direction), r.degenerate_dirs[j].angle) < tol.match_tol) near = true;
    if (!near) r.facet_violations.push_back("degenerate direction at angle " + fmt(r.degenerate_dirs[j].angle) + " has no facet");
  }
  return r;
}

FeatureReport verify_corner_theorem(const Norm& norm, const ConvexPolygon& p, const FeatureTolerances& tol) {
  FeatureReport r;
  r.corners = detect_corners(p, tol.corner_tol);
  r.additivity_cones = additivity_cones(norm);
  for (std::size_t i = 0; i < r.corners.size(); ++i) {
    const Corner& c = r.corners[i];
    const bool add = additivity_on_pair(norm, c.v_minus, c.v_plus, tol.additivity_tol);
    r.corner_matches.push_back({i, add});
    if (!add)
      r.corner_violations.push_back("corner at (" + fmt(c.point.x) + ", " + fmt(c.point.y) +
                                    ") has non-additive tangents");
  }
  for (const auto& cone : r.additivity_cones) {
    bool hosted = false;
    for (const auto& c : r.corners)
      if (angle_in_cone(angle_of(c.v_minus), cone, tol.match_tol) && angle_in_cone(angle_of(c.v_plus), cone, tol.match_tol))
        hosted = true;
    if (!hosted)
      r.corner_violations.push_back("additivity cone [" + fmt(cone.from) + ", " + fmt(cone.to) + "] has no corner");
  }
  return r;
}

FeatureReport analyze_features(const Norm& norm, const ConvexPolygon& p, const FeatureTolerances& tol) {
  FeatureReport r = verify_facet_theorem(norm, p, tol);
  FeatureReport c = verify_corner_theorem(norm, p, tol);
  r.corners = std::move(c.corners);
  r.additivity_cones = std::move(c.additivity_cones);
  r.corner_matches = std::move(c.corner_matches);
  r.corner_violations = std::move(c.corner_violations);
  return r;
}

int unpaired_corners(const ConvexPolygon& centered, const FeatureTolerances& tol, double position_tol) {
  const std::vector<Corner> cs = detect_corners(centered, tol.corner_tol);
  const double scale = diameter(centered);
  int missing = 0;
  for (const auto& c : cs) {
    bool paired = false;
    for (const auto& d : cs) {
      if (norm2(d.point + c.point) > position_tol * scale) continue;
      if (angle_distance(angle_of(d.v_minus), angle_of(-c.v_minus)) < tol.match_tol &&
          angle_distance(angle_of(d.v_plus), angle_of(-c.v_plus)) < tol.match_tol)
        paired = true;
    }
    if (!paired) ++missing;
  }
  return missing;
}

OptimalityResidual optimality_residual(const Norm& norm, const ConvexPolygon& p, const EigenSolution& e,
                                       const FeatureTolerances& tol) {
  const auto* pn = std::get_if<PNorm>(&norm.variant());
  if (pn == nullptr || !(pn->p > 1.0) || std::isinf(pn->p))
    throw std::invalid_argument("optimality_residual needs a p-norm with 1 < p < infinity");
  if (!detect_corners(p, tol.corner_tol).empty())
    throw std::invalid_argument("optimality_residual refuses shapes with corners");
  if (!detect_facets(p, tol.facet_tol, tol.angle_merge_tol).empty())
    throw std::invalid_argument("optimality_residual refuses shapes with facets");
  const std::size_t n = p.size();
  const std::vector<double> flux = edge_flux(p, e);
  // exact derivative of P with respect to the support value of each edge
  std::vector<double> dp(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 tm = normalized(p.edge(i + n - 1));
    const Vec2 t0 = normalized(p.edge(i));
    const Vec2 tp = normalized(p.edge(i + 1));
    const double a = std::atan2(cross(tm, t0), dot(tm, t0));
    const double b = std::atan2(cross(t0, tp), dot(t0, tp));
    dp[i] = norm(tm) / std::sin(a) + norm(tp) / std::sin(b) - norm(t0) * (1.0 / std::tan(a) + 1.0 / std::tan(b));
  }
  OptimalityResidual out;
  out.ratio.resize(n);
  constexpr int kHalf = 3;
  for (std::size_t i = 0; i < n; ++i) {
    double num = 0.0;
    double den = 0.0;
    for (int d = -kHalf; d <= kHalf; ++d) {
      const double w = std::exp(-0.5 * d * d);
      const std::size_t j = (i + n + static_cast<std::size_t>(d + static_cast<int>(n))) % n;
      num += w * flux[j];
      den += w * dp[j];
    }
    out.ratio[i] = num / den;
  }
  double mean = 0.0;
  for (double r : out.ratio) mean += r;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double r : out.ratio) var += (r - mean) * (r - mean);
  var /= static_cast<double>(n);
  out.coefficient_of_variation = std::sqrt(var) / mean;
  return out;
}

MinkowskiPairResult minkowski_pair(const ConvexPolygon& p, const ConvexPolygon& q, bool homothetic,
                                   const MinkowskiOptions& opts) {
  MinkowskiPairResult r;
  const ExtrapolatedEigenvalue lp = eigenvalue_extrapolated(p, opts.eval.levels, opts.eval.base_cells);
  const ExtrapolatedEigenvalue lq = eigenvalue_extrapolated(q, opts.eval.levels, opts.eval.base_cells);
  const double alphas[3] = {0.25, 0.5, 0.75};
  const double t = std::sqrt(area(q) / area(p));
  r.convex = true;
  r.strict = true;
  double lambda_half = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double a = alphas[i];
    const ConvexPolygon m = minkowski_sum(scale_translate(p, a, {0, 0}), scale_translate(q, 1.0 - a, {0, 0}));
    const ExtrapolatedEigenvalue lm = eigenvalue_extrapolated(m, opts.eval.levels, opts.eval.base_cells);
    const double chord = a * lp.lambda + (1.0 - a) * lq.lambda;
    const double tol_abs = 3.0 * (a * lp.error_estimate + (1.0 - a) * lq.error_estimate + lm.error_estimate) + 1e-6 * chord;
    r.convexity_slack[i] = (chord - lm.lambda) / chord;
    r.convexity_tol = std::max(r.convexity_tol, tol_abs / chord);
    if (chord - lm.lambda < -tol_abs) r.convex = false;
    if (homothetic) {
      const double s = a + (1.0 - a) * t;
      const double predicted = lp.lambda / (s * s);
      if (std::abs(lm.lambda - predicted) > tol_abs) r.strict = false;
    } else if (i == 1 && !(chord - lm.lambda > tol_abs)) {
      r.strict = false;
    }
    if (i == 1) lambda_half = lm.lambda;
  }
  // p + q = 2 (p/2 + q/2)
  const double lhs = 1.0 / std::sqrt(lambda_half / 4.0);
  const double rhs = 1.0 / std::sqrt(lp.lambda) + 1.0 / std::sqrt(lq.lambda);
  r.brunn_minkowski_margin = (lhs - rhs) / rhs;
  r.brunn_minkowski = r.brunn_minkowski_margin >= -opts.brunn_minkowski_tol;
  if (homothetic && std::abs(r.brunn_minkowski_margin) > opts.brunn_minkowski_tol) r.brunn_minkowski = false;

  const Norm norms[3] = {Norm::l1(), Norm::euclidean(), Norm::linf()};
  for (const Norm& nm : norms) {
    for (double a : alphas) {
      const ConvexPolygon m = minkowski_sum(scale_translate(p, a, {0, 0}), scale_translate(q, 1.0 - a, {0, 0}));
      const double affine = a * perimeter(p, nm) + (1.0 - a) * perimeter(q, nm);
      r.perimeter_rel_error = std::max(r.perimeter_rel_error, std::abs(perimeter(m, nm) - affine) / affine);
    }
  }
  r.perimeter_affine = r.perimeter_rel_error <= opts.perimeter_tol;
  return r;
}

MinkowskiReport minkowski_suite(std::uint64_t seed, int n_pairs, const MinkowskiOptions& opts) {
  if (n_pairs < 1) throw std::invalid_argument("minkowski_suite needs at least one pair");
  MinkowskiReport rep;
  for (int i = 0; i < n_pairs; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    const int np = 5 + static_cast<int>(uniform01(rng) * 8);
    const int nq = 5 + static_cast<int>(uniform01(rng) * 8);
    const double rp = uniform(rng, 0.6, 1.4);
    const double rq = uniform(rng, 0.6, 1.4);
    const ConvexPolygon p = random_convex_polygon(rng, np, rp);
    const ConvexPolygon q = translate(random_convex_polygon(rng, nq, rq), {uniform(rng, -1, 1), uniform(rng, -1, 1)});
    MinkowskiPairResult r = minkowski_pair(p, q, false, opts);
    r.pair = i;
    if (r.passed()) ++rep.passed;
    rep.pairs.push_back(r);
  }
  return rep;
}

RectangleReport counterexample_rectangles(double n, const std::vector<double>& a_grid, bool cross_check,
                                          int base_cells) {
  if (!(n >= 1.0)) throw std::invalid_argument("counterexample_rectangles needs n >= 1");
  if (a_grid.empty()) throw std::invalid_argument("a_grid must not be empty");
  RectangleReport rep;
  rep.n = n;
  const Norm rho = Norm::weighted_l1(1.0 / n, n);
  const double pi2 = kPi * kPi;
  for (double a : a_grid) {
    if (!(a > 0.0)) throw std::invalid_argument("a_grid values must be positive");
    RectangleRow row;
    row.a = a;
    row.A = pi2 * (a * a / (n * n) + n * n / (a * a));
    row.B = 1.0 / a + a;
    row.f_star = 3.0 * std::cbrt(row.A) * std::pow(row.B, 2.0 / 3.0);
    if (cross_check) {
      const ConvexPolygon u = axis_rectangle(0, 0, n / a, a / n);
      const FunctionalValue v = evaluate(u, rho, {3, base_cells});
      row.lambda_numeric = v.lambda;
      row.lambda_rel_error = std::abs(v.lambda - row.A) / row.A;
      row.f_star_numeric = v.f_star;
      rep.max_lambda_rel_error = std::max(rep.max_lambda_rel_error, row.lambda_rel_error);
    }
    rep.rows.push_back(row);
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (rep.rows[i].f_star < rep.rows[rep.argmin].f_star) rep.argmin = i;
  rep.argmin_away_from_one = std::abs(rep.rows[rep.argmin].a - 1.0) > 1e-12;
  return rep;
}

PerimeterDerivativeReport perimeter_derivative_check(const Norm& norm, const ConvexPolygon& p, const Facet& facet,
                                                     const std::vector<double>& heights) {
  if (facet.length <= 0.0 || facet.edge_count == 0) throw std::invalid_argument("perimeter_derivative_check needs a facet");
  if (heights.size() < 3 || heights.front() != 0.0 || heights.back() != 0.0)
    throw std::invalid_argument("bump must have at least three knots and vanish at both ends");
  PerimeterDerivativeReport r;
  const Vec2 e = normalized(facet.end - facet.start);
  const Vec2 outward{e.y, -e.x};
  r.direction = e;
  r.gap = one_sided_derivatives(norm, e).gap();
  for (std::size_t i = 0; i + 1 < heights.size(); ++i) r.bump_variation += std::abs(heights[i + 1] - heights[i]);
  r.predicted = 0.5 * r.gap * r.bump_variation;

  const std::size_t n = p.size();
  const double base = perimeter(p, norm);
  auto perturbed = [&](double s) {
    std::vector<Vec2> v;
    const std::size_t m = heights.size() - 1;
    for (std::size_t j = 0; j < m; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(m);
      v.push_back(facet.start + (t * facet.length) * e + (s * heights[j]) * outward);
    }
    for (std::size_t j = facet.edge_count; j < n; ++j) v.push_back(p.vertex(facet.first_edge + j));
    return ConvexPolygon(std::move(v));
  };
  const double steps[3] = {1e-2, 5e-3, 2.5e-3};
  for (int i = 0; i < 3; ++i) r.quotients[i] = (perimeter(perturbed(steps[i]), norm) - base) / steps[i];
  // D(s) = D0 + c1 s + c2 s^2
  const double r1 = 2.0 * r.quotients[1] - r.quotients[0];
  const double r2 = 2.0 * r.quotients[2] - r.quotients[1];
  r.extrapolated = (4.0 * r2 - r1) / 3.0;
  if (r.predicted != 0.0) {
    r.rel_error = std::abs(r.extrapolated - r.predicted) / std::abs(r.predicted);
    r.passed = r.rel_error <= 0.05;
  } else {
    const double scale = max_on_unit_circle(norm) * std::max(r.bump_variation, 1e-300);
    r.rel_error = std::abs(r.extrapolated) / scale;
    r.passed = r.rel_error <= 1e-3;
  }
  return r;
}

}  // namespace drumshape
