#include "drumshape/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace drumshape {

namespace {

constexpr double kPi = std::numbers::pi;

double point_set_diameter(const std::vector<Vec2>& v) {
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, norm2(v[i] - v[j]));
  return d;
}

bool lex_less(const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

// Clips a convex polygon (counterclockwise) by the half-plane n . x <= c.
std::vector<Vec2> clip(const std::vector<Vec2>& poly, const Vec2& n, double c) {
  std::vector<Vec2> out;
  const std::size_t m = poly.size();
  out.reserve(m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    const double da = dot(n, a) - c;
    const double db = dot(n, b) - c;
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

}  // namespace

ConvexPolygon::ConvexPolygon(std::vector<Vec2> v) {
  for (const auto& p : v)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("polygon vertex is not finite");
  if (v.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  const double scale = point_set_diameter(v);
  if (!(scale > 0.0)) throw std::invalid_argument("polygon is degenerate (all vertices coincide)");
  const double dup_tol = 1e-12 * scale;
  const double cross_tol = 1e-12 * scale * scale;

  double area2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) area2 += cross(v[i], v[(i + 1) % v.size()]);
  if (area2 < 0.0) std::reverse(v.begin(), v.end());

  // drop repeated vertices (including the closing one)
  std::vector<Vec2> w;
  for (const auto& p : v)
    if (w.empty() || norm2(p - w.back()) > dup_tol) w.push_back(p);
  while (w.size() > 1 && norm2(w.front() - w.back()) <= dup_tol) w.pop_back();

  // drop collinear vertices until stable
  bool changed = true;
  while (changed && w.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::size_t n = w.size();
      const Vec2& a = w[(i + n - 1) % n];
      const Vec2& b = w[i];
      const Vec2& c = w[(i + 1) % n];
      const double cr = cross(b - a, c - b);
      if (std::abs(cr) <= cross_tol && dot(b - a, c - b) >= -dup_tol * scale) {
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (w.size() < 3) throw std::invalid_argument("polygon is degenerate (collinear vertices)");
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::size_t n = w.size();
    const double cr = cross(w[i] - w[(i + n - 1) % n], w[(i + 1) % n] - w[i]);
    if (cr <= cross_tol) throw std::invalid_argument("polygon is not convex or not counterclockwise");
  }
  const auto first = std::min_element(w.begin(), w.end(), lex_less);
  std::rotate(w.begin(), first, w.end());
  vertices_ = std::move(w);
}

ConvexPolygon convex_hull(std::span<const Vec2> points) {
  std::vector<Vec2> pts(points.begin(), points.end());
  if (pts.size() < 3) throw std::invalid_argument("convex hull needs at least 3 points");
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const double scale = point_set_diameter({pts.front(), pts.back()}) + 1e-300;
  const double tol = 1e-12 * scale * scale;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= tol) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= tol) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k > 0 ? k - 1 : 0);
  if (hull.size() < 3) throw std::invalid_argument("convex hull of collinear points is degenerate");
  return ConvexPolygon(std::move(hull));
}

ConvexPolygon minkowski_sum(const ConvexPolygon& p, const ConvexPolygon& q) {
  auto from_bottom = [](const ConvexPolygon& poly) {
    std::vector<Vec2> v = poly.vertices();
    const auto lowest = std::min_element(v.begin(), v.end(), [](const Vec2& a, const Vec2& b) {
      return a.y < b.y || (a.y == b.y && a.x < b.x);
    });
    std::rotate(v.begin(), lowest, v.end());
    v.push_back(v[0]);
    v.push_back(v[1]);
    return v;
  };
  const auto a = from_bottom(p);
  const auto b = from_bottom(q);
  const std::size_t n = p.size();
  const std::size_t m = q.size();
  std::vector<Vec2> out;
  out.reserve(n + m);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    out.push_back(a[i] + b[j]);
    const double c = cross(a[i + 1] - a[i], b[j + 1] - b[j]);
    if (c >= 0.0 && i < n) ++i;
    if (c <= 0.0 && j < m) ++j;
  }
  return ConvexPolygon(std::move(out));
}

double perimeter(const ConvexPolygon& p, const Norm& norm) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += norm(p.edge(i));
  return total;
}

double euclidean_perimeter(const ConvexPolygon& p) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += norm2(p.edge(i));
  return total;
}

double area(const ConvexPolygon& p) {
  double a2 = 0.0;
  const Vec2 o = p[0];
  for (std::size_t i = 1; i + 1 < p.size(); ++i) a2 += cross(p[i] - o, p[i + 1] - o);
  return 0.5 * a2;
}

Vec2 centroid(const ConvexPolygon& p) {
  const Vec2 o = p[0];
  double a2 = 0.0;
  Vec2 acc;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double c = cross(p[i] - o, p[i + 1] - o);
    a2 += c;
    acc += c * (p[i] - o + p[i + 1] - o);
  }
  return o + acc / (3.0 * a2);
}

double diameter(const ConvexPolygon& p) { return point_set_diameter(p.vertices()); }

double inradius(const ConvexPolygon& p) {
  // bisection on r: the polygon shrunk by r is nonempty
  const std::size_t n = p.size();
  std::vector<Vec2> normals(n);
  std::vector<double> offsets(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = p.edge(i);
    normals[i] = normalized(Vec2{e.y, -e.x});
    offsets[i] = dot(normals[i], p[i]);
  }
  double lo = 0.0;
  double hi = 0.5 * diameter(p);
  for (int it = 0; it < 60; ++it) {
    const double r = 0.5 * (lo + hi);
    std::vector<Vec2> poly = p.vertices();
    for (std::size_t i = 0; i < n && poly.size() >= 3; ++i) poly = clip(poly, normals[i], offsets[i] - r);
    bool nonempty = poly.size() >= 3;
    if (nonempty) {
      double a2 = 0.0;
      for (std::size_t i = 0; i < poly.size(); ++i) a2 += cross(poly[i], poly[(i + 1) % poly.size()]);
      nonempty = a2 > 0.0;
    }
    (nonempty ? lo : hi) = r;
  }
  return lo;
}

double support_function(const ConvexPolygon& p, const Vec2& u) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : p.vertices()) best = std::max(best, dot(v, u));
  return best;
}

namespace {

std::vector<double> normal_angles(const ConvexPolygon& p) {
  std::vector<double> a;
  a.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 e = p.edge(i);
    a.push_back(wrap_angle(std::atan2(-e.x, e.y)));
  }
  return a;
}

std::size_t argmax_dot(const ConvexPolygon& p, const Vec2& u) {
  std::size_t best = 0;
  double val = dot(p[0], u);
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double d = dot(p[i], u);
    if (d > val) {
      val = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

double hausdorff_distance(const ConvexPolygon& p, const ConvexPolygon& q) {
  std::vector<double> events = normal_angles(p);
  const auto qa = normal_angles(q);
  events.insert(events.end(), qa.begin(), qa.end());
  std::sort(events.begin(), events.end());
  auto diff_at = [&](double phi) {
    const Vec2 u = unit_at(phi);
    return std::abs(support_function(p, u) - support_function(q, u));
  };
  double best = 0.0;
  const std::size_t n = events.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = events[i];
    const double b = (i + 1 < n) ? events[i + 1] : events[0] + 2.0 * kPi;
    best = std::max(best, diff_at(a));
    if (b - a <= 0.0) continue;
    // on (a, b) the active vertices are fixed and h_p - h_q = w . u(phi)
    const Vec2 um = unit_at(0.5 * (a + b));
    const Vec2 w = p[argmax_dot(p, um)] - q[argmax_dot(q, um)];
    if (norm2(w) == 0.0) continue;
    for (double cand : {angle_of(w), angle_of(-w)}) {
      double c = wrap_angle(cand - a) + a;
      if (c > a && c < b) best = std::max(best, diff_at(c));
    }
  }
  return best;
}

double hausdorff_modulo_translation(const ConvexPolygon& p, const ConvexPolygon& q) {
  // convex in the shift; compass search from the centroid alignment
  Vec2 x = centroid(p) - centroid(q);
  auto f = [&](const Vec2& s) { return hausdorff_distance(p, translate(q, s)); };
  double best = f(x);
  double step = 0.1 * std::max(diameter(p), diameter(q));
  const double stop = 1e-10 * step;
  const Vec2 dirs[8] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
  while (step > stop) {
    bool improved = false;
    for (const auto& d : dirs) {
      const Vec2 cand = x + step * d;
      const double val = f(cand);
      if (val < best) {
        best = val;
        x = cand;
        improved = true;
        break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

ConvexPolygon scale_translate(const ConvexPolygon& p, double t, const Vec2& shift) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("dilation factor must be positive");
  std::vector<Vec2> v;
  v.reserve(p.size());
  for (const auto& x : p.vertices()) v.push_back(t * x + shift);
  return ConvexPolygon(std::move(v));
}

ConvexPolygon translate(const ConvexPolygon& p, const Vec2& shift) { return scale_translate(p, 1.0, shift); }

ConvexPolygon reflect(const ConvexPolygon& p) {
  std::vector<Vec2> v;
  for (const auto& x : p.vertices()) v.push_back(-x);
  return ConvexPolygon(std::move(v));
}

ConvexPolygon rotate(const ConvexPolygon& p, double angle) {
  std::vector<Vec2> v;
  for (const auto& x : p.vertices()) v.push_back(drumshape::rotate(x, angle));
  return ConvexPolygon(std::move(v));
}

CenteredPolygon center(const ConvexPolygon& p, CenterMode mode) {
  const Vec2 shift = -centroid(p);
  CenteredPolygon out{translate(p, shift), shift, 0.0};
  if (mode == CenterMode::symmetrize) out.asymmetry_defect = hausdorff_distance(out.polygon, reflect(out.polygon));
  return out;
}

bool contains_strictly(const ConvexPolygon& p, const Vec2& x, double margin) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 e = p.edge(i);
    if (cross(e, x - p[i]) / norm2(e) <= margin) return false;
  }
  return true;
}

double distance_to_boundary(const ConvexPolygon& p, const Vec2& x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 e = p.edge(i);
    best = std::min(best, cross(e, x - p[i]) / norm2(e));
  }
  return best;
}

double gauge(const ConvexPolygon& p, const Vec2& x) {
  double best = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 e = p.edge(i);
    const Vec2 n{e.y, -e.x};
    const double c = dot(n, p[i]);
    if (!(c > 0.0)) throw std::invalid_argument("gauge requires the origin strictly inside the polygon");
    best = std::max(best, dot(n, x) / c);
  }
  return best;
}

double SupportVector::angle(int i) const { return 2.0 * kPi * i / k(); }
Vec2 SupportVector::direction(int i) const { return unit_at(angle(i)); }

bool SupportVector::in_cone(double rel_tol) const {
  const int n = k();
  if (n < 3) return false;
  const double c = std::cos(2.0 * kPi / n);
  for (int i = 0; i < n; ++i) {
    const double h = values[i];
    if (!(h > 0.0)) return false;
    const double lhs = values[(i + n - 1) % n] + values[(i + 1) % n];
    if (lhs < 2.0 * c * h - rel_tol * h) return false;
  }
  return true;
}

SupportVector support_vector_of(const ConvexPolygon& p, int k) {
  if (k < 3) throw std::invalid_argument("support vector needs at least 3 angles");
  SupportVector s;
  s.values.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) s.values[i] = support_function(p, unit_at(2.0 * kPi * i / k));
  return s;
}

ConvexPolygon polygon_from_support(const SupportVector& s) {
  const int n = s.k();
  if (n < 3) throw std::invalid_argument("support vector needs at least 3 angles");
  double hmax = 0.0;
  for (double h : s.values) {
    if (!std::isfinite(h)) throw std::invalid_argument("support value is not finite");
    hmax = std::max(hmax, std::abs(h));
  }
  const double big = 8.0 * hmax / std::sin(std::min(kPi / 2, 2.0 * kPi / n)) + 1.0;
  std::vector<Vec2> poly = {{-big, -big}, {big, -big}, {big, big}, {-big, big}};
  for (int i = 0; i < n && poly.size() >= 3; ++i) poly = clip(poly, s.direction(i), s[i]);
  if (poly.size() < 3) throw std::invalid_argument("support values are infeasible (empty intersection)");
  try {
    return ConvexPolygon(std::move(poly));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("support values are infeasible (degenerate intersection)");
  }
}

ConvexPolygon intersect_halfplanes(std::span<const Vec2> normals, std::span<const double> offsets,
                                   double bound) {
  if (normals.size() != offsets.size()) throw std::invalid_argument("one offset per half-plane normal");
  std::vector<Vec2> poly = {{-bound, -bound}, {bound, -bound}, {bound, bound}, {-bound, bound}};
  for (std::size_t i = 0; i < normals.size() && poly.size() >= 3; ++i) poly = clip(poly, normals[i], offsets[i]);
  if (poly.size() < 3) throw std::invalid_argument("half-plane intersection is empty");
  for (const auto& v : poly)
    if (std::abs(v.x) >= bound * (1 - 1e-12) || std::abs(v.y) >= bound * (1 - 1e-12))
      throw std::invalid_argument("half-plane intersection is unbounded");
  return ConvexPolygon(std::move(poly));
}

int project_to_cone(SupportVector& s, int max_sweeps) {
  const int n = s.k();
  const double c = std::cos(2.0 * kPi / n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool violated = false;
    for (int i = 0; i < n; ++i) {
      const double lhs = s.values[(i + n - 1) % n] + s.values[(i + 1) % n];
      if (lhs < 2.0 * c * s.values[i] * (1.0 - 1e-14)) {
        s.values[i] = lhs / (2.0 * c);
        violated = true;
      }
    }
    if (!violated) return sweep;
  }
  // The sweeps converge to the support values of the half-plane intersection;
  // jump straight to that fixed point.
  const ConvexPolygon p = polygon_from_support(s);
  for (int i = 0; i < n; ++i) s.values[i] = std::min(s.values[i], support_function(p, s.direction(i)));
  return max_sweeps;
}

double sandwich_epsilon(const ConvexPolygon& u, const ConvexPolygon& v) {
  if (!contains_strictly(u, {0, 0}) || !contains_strictly(v, {0, 0}))
    throw std::invalid_argument("sandwich_epsilon requires the origin strictly inside both polygons");
  // v within (1 + eps) u  <=>  max over vertices of v of gauge_u <= 1 + eps
  double outer = 0.0;
  for (const auto& x : v.vertices()) outer = std::max(outer, gauge(u, x));
  // (1 - eps) u within v  <=>  max over vertices of u of gauge_v <= 1 / (1 - eps)
  double inner = 0.0;
  for (const auto& x : u.vertices()) inner = std::max(inner, gauge(v, x));
  return std::max({0.0, outer - 1.0, 1.0 - 1.0 / inner});
}

ConvexPolygon random_convex_polygon(std::mt19937_64& rng, int n, double radius) {
  const double aspect = uniform(rng, 0.5, 1.0);
  const double tilt = uniform(rng, 0.0, kPi);
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    const double phi = uniform(rng, 0.0, 2.0 * kPi);
    const double r = radius * uniform(rng, 0.85, 1.0);
    pts.push_back(drumshape::rotate(Vec2{r * std::cos(phi) / std::sqrt(aspect), r * std::sin(phi) * std::sqrt(aspect)}, tilt));
  }
  ConvexPolygon hull = convex_hull(pts);
  return translate(hull, -centroid(hull));
}

ConvexPolygon regular_polygon(int n, double r, double phase) {
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) v.push_back(r * unit_at(phase + 2.0 * kPi * i / n));
  return ConvexPolygon(std::move(v));
}

ConvexPolygon axis_rectangle(double x0, double y0, double x1, double y1) {
  return ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

}  // namespace drumshape
