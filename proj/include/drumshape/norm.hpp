#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "drumshape/vec2.hpp"

namespace drumshape {

class Norm;

/// ell^p norm; p may be +infinity.
struct PNorm {
  double p = 2.0;
};

/// w1 |x| + w2 |y|.
struct WeightedL1 {
  double w1 = 1.0;
  double w2 = 1.0;
};

/// Gauge of a centrally symmetric convex polygon. Edge normals and offsets are
/// cached so that evaluation is a max over edges of (n_i . x) / c_i.
struct PolygonalBall {
  std::vector<Vec2> vertices;
  std::vector<Vec2> normals;
  std::vector<double> offsets;
};

struct NormSum {
  std::vector<double> weights;
  std::vector<Norm> terms;
};

/// The inner norm with its unit ball rotated counterclockwise by `angle`.
struct RotatedNorm {
  double angle = 0.0;
  std::shared_ptr<const Norm> inner;
};

/// Immutable norm on the plane. Copies share the underlying representation.
class Norm {
 public:
  using Variant = std::variant<PNorm, WeightedL1, PolygonalBall, NormSum, RotatedNorm>;

  static Norm p_norm(double p);
  static Norm euclidean() { return p_norm(2.0); }
  static Norm l1() { return p_norm(1.0); }
  static Norm linf();
  static Norm weighted_l1(double w1, double w2);
  /// Vertices must be in convex position, centrally symmetric, and surround
  /// the origin. Either orientation is accepted.
  static Norm polygonal(std::vector<Vec2> ball_vertices);
  static Norm sum(std::vector<double> weights, std::vector<Norm> terms);
  static Norm rotated(double angle, Norm inner);

  double operator()(const Vec2& x) const;

  const Variant& variant() const { return *rep_; }

  /// Expression in the norm mini-language that rebuilds this norm.
  std::string to_spec() const;

 private:
  explicit Norm(Variant v);
  std::shared_ptr<const Variant> rep_;
};

/// Parses one expression of the norm mini-language:
///   p:<real> | p:inf | wl1:<w1>,<w2> | poly:(x1,y1);(x2,y2);...
///   rot:<radians>:(<expr>) | sum:<w>*(<expr>)+<w>*(<expr>)+...
/// Numbers may be written as fractions like 1/3. Throws std::invalid_argument
/// naming the violated requirement.
Norm build_norm(std::string_view spec);

/// One-sided derivatives of s -> rho(e + s e_perp) at s = 0, e_perp = perp(e).
struct NormProbe {
  Vec2 e;
  Vec2 e_perp;
  double theta_minus = 0.0;
  double theta_plus = 0.0;

  double gap() const { return theta_plus - theta_minus; }
};

/// Analytic one-sided derivatives for every variant. `e` must be a Euclidean
/// unit vector.
NormProbe one_sided_derivatives(const Norm& norm, const Vec2& e);

/// One-sided difference quotients at s in {1e-3, 1e-4, 1e-5} combined by
/// Richardson extrapolation. Works for any norm; used as the fallback and as
/// a cross-check of the analytic derivatives.
NormProbe one_sided_derivatives_numeric(const Norm& norm, const Vec2& e);

bool is_degenerate(const Norm& norm, const Vec2& e, double tol = 1e-6);

/// rho(v- + v+) == rho(v-) + rho(v+) up to a relative tolerance. By
/// homogeneity and the triangle inequality this is equivalent to additivity on
/// the whole cone {a v- + b v+ : a, b >= 0}.
bool additivity_on_pair(const Norm& norm, const Vec2& v_minus, const Vec2& v_plus,
                        double tol = 1e-9);

struct DegenerateDirection {
  Vec2 e;
  double angle = 0.0;  // in [0, pi)
  double gap = 0.0;
};

/// Directions where s -> rho(e + s e_perp) has a kink, reported once per
/// +-e pair with angle in [0, pi).
std::vector<DegenerateDirection> degenerate_directions(const Norm& norm, int n_angles = 64,
                                                       double tol = 1e-6);

/// Maximal angular interval [from, to] (counterclockwise) of directions on
/// which the norm is additive, i.e. where its unit ball has a flat edge.
struct AdditivityCone {
  double from = 0.0;  // in [0, 2 pi)
  double to = 0.0;    // from < to, possibly beyond 2 pi
  double width() const { return to - from; }
};

std::vector<AdditivityCone> additivity_cones(const Norm& norm, int n_angles = 720,
                                             double tol = 1e-9, double min_width = 0.07);

/// min over Euclidean unit vectors of rho.
double min_on_unit_circle(const Norm& norm, int samples = 4096);
double max_on_unit_circle(const Norm& norm, int samples = 4096);

}  // namespace drumshape
