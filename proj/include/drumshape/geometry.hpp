#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "drumshape/norm.hpp"
#include "drumshape/vec2.hpp"

namespace drumshape {

/// Convex polygon in canonical form: counterclockwise, no repeated vertices,
/// no three consecutive collinear vertices, lexicographically smallest vertex
/// first. Construction canonicalizes and validates; non-convex or degenerate
/// input throws std::invalid_argument.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Vec2& operator[](std::size_t i) const { return vertices_[i]; }
  const Vec2& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  /// Edge vector from vertex i to vertex i + 1.
  Vec2 edge(std::size_t i) const { return vertex(i + 1) - vertex(i); }

 private:
  std::vector<Vec2> vertices_;
};

/// Andrew monotone chain. Throws on fewer than three non-collinear points.
ConvexPolygon convex_hull(std::span<const Vec2> points);

/// Edge-merge construction; at most |p| + |q| vertices.
ConvexPolygon minkowski_sum(const ConvexPolygon& p, const ConvexPolygon& q);

/// Sum of rho(edge) over the edges.
double perimeter(const ConvexPolygon& p, const Norm& norm);
double euclidean_perimeter(const ConvexPolygon& p);
double area(const ConvexPolygon& p);
Vec2 centroid(const ConvexPolygon& p);
double diameter(const ConvexPolygon& p);
/// Radius of the largest inscribed disc.
double inradius(const ConvexPolygon& p);

double support_function(const ConvexPolygon& p, const Vec2& u);

/// Exact Hausdorff distance, max over directions of |h_p(u) - h_q(u)|,
/// maximized over the merged edge-normal event angles of p and q.
double hausdorff_distance(const ConvexPolygon& p, const ConvexPolygon& q);

/// min over translations x of dist_H(p, x + q).
double hausdorff_modulo_translation(const ConvexPolygon& p, const ConvexPolygon& q);

ConvexPolygon scale_translate(const ConvexPolygon& p, double t, const Vec2& shift);
ConvexPolygon translate(const ConvexPolygon& p, const Vec2& shift);
/// Point reflection through the origin.
ConvexPolygon reflect(const ConvexPolygon& p);
/// Rotation about the origin.
ConvexPolygon rotate(const ConvexPolygon& p, double angle);

enum class CenterMode { centroid, symmetrize };

struct CenteredPolygon {
  ConvexPolygon polygon;
  Vec2 shift;                     // translation that was applied
  double asymmetry_defect = 0.0;  // dist_H(p, -p) after centering; symmetrize mode only
};

CenteredPolygon center(const ConvexPolygon& p, CenterMode mode = CenterMode::centroid);

/// true if x is in the interior, at distance more than `margin` from every edge line.
bool contains_strictly(const ConvexPolygon& p, const Vec2& x, double margin = 0.0);

/// Minkowski functional of p; requires the origin strictly inside p.
double gauge(const ConvexPolygon& p, const Vec2& x);

/// Support-function samples h_k at the angles 2 pi k / K.
struct SupportVector {
  std::vector<double> values;

  SupportVector() = default;
  explicit SupportVector(std::vector<double> v) : values(std::move(v)) {}

  int k() const { return static_cast<int>(values.size()); }
  double angle(int i) const;
  Vec2 direction(int i) const;
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }

  /// Discrete convexity cone h_{k-1} + h_{k+1} >= 2 cos(2 pi/K) h_k with
  /// all h_k > 0, up to a relative slack.
  bool in_cone(double rel_tol = 1e-12) const;
};

/// Samples of the support function of p.
SupportVector support_vector_of(const ConvexPolygon& p, int k);

/// Intersection of the half-planes x . u_k <= h_k. Throws std::invalid_argument
/// if the intersection is empty or degenerate.
ConvexPolygon polygon_from_support(const SupportVector& s);

/// Intersection of half-planes n_i . x <= c_i (normals need not be unit).
/// Throws std::invalid_argument if empty or unbounded within a box of half
/// width `bound`.
ConvexPolygon intersect_halfplanes(std::span<const Vec2> normals, std::span<const double> offsets,
                                   double bound);

/// Cyclic second-difference projection: lowers each h_k that violates the cone
/// to (h_{k-1} + h_{k+1}) / (2 cos(2 pi/K)), sweeping until no violation is left.
/// After `max_sweeps` the fixed point (support values of the half-plane
/// intersection) is taken directly. Returns the number of sweeps; throws
/// std::invalid_argument if the intersection is empty.
int project_to_cone(SupportVector& s, int max_sweeps = 64);

/// Smallest eps >= 0 with (1 - eps) u within v within (1 + eps) u. Both
/// polygons must contain the origin strictly.
double sandwich_epsilon(const ConvexPolygon& u, const ConvexPolygon& v);

/// Euclidean distance from x to the boundary of p (x inside p).
double distance_to_boundary(const ConvexPolygon& p, const Vec2& x);

/// Deterministic uniform double in [0, 1) from a 64-bit engine.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Random convex polygon: hull of `n` jittered points on a random ellipse with
/// mean radius `radius`, centered at its centroid.
ConvexPolygon random_convex_polygon(std::mt19937_64& rng, int n, double radius);

/// Regular n-gon with circumradius r centered at the origin, vertex at angle `phase`.
ConvexPolygon regular_polygon(int n, double r, double phase = 0.0);
ConvexPolygon axis_rectangle(double x0, double y0, double x1, double y1);

}  // namespace drumshape
