#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drumshape/functional.hpp"
#include "drumshape/geometry.hpp"
#include "drumshape/norm.hpp"
#include "drumshape/spectral.hpp"

namespace drumshape {

struct FeatureTolerances {
  double facet_tol = 0.05;         // facets longer than this fraction of the diameter
  double angle_merge_tol = 0.01;   // consecutive edges closer than this merge into one facet
  double corner_tol = 0.2;         // exterior turning angle of a corner
  double match_tol = 0.035;        // angular mismatch allowed when pairing features
  double additivity_tol = 1e-9;    // relative slack of rho(v- + v+) = rho(v-) + rho(v+)
  int degenerate_angles = 64;
};

struct Facet {
  Vec2 direction;  // unit, angle in [0, pi)
  double length = 0.0;
  Vec2 start;
  Vec2 end;
  std::size_t first_edge = 0;
  std::size_t edge_count = 0;
};

struct Corner {
  Vec2 point;
  Vec2 v_minus;  // unit tangent of the incoming edge
  Vec2 v_plus;   // unit tangent of the outgoing edge
  double turning = 0.0;
  std::size_t vertex = 0;
};

std::vector<Facet> detect_facets(const ConvexPolygon& p, double facet_tol = 0.05, double angle_merge_tol = 0.01);
std::vector<Corner> detect_corners(const ConvexPolygon& p, double corner_tol = 0.2);

struct FacetMatch {
  std::size_t facet = 0;
  std::size_t direction = 0;
  double mismatch = 0.0;
};

struct CornerMatch {
  std::size_t corner = 0;
  bool additive = false;
};

struct FeatureReport {
  std::vector<Facet> facets;
  std::vector<Corner> corners;
  std::vector<DegenerateDirection> degenerate_dirs;
  std::vector<AdditivityCone> additivity_cones;
  std::vector<FacetMatch> facet_matches;
  std::vector<CornerMatch> corner_matches;
  std::vector<std::string> facet_violations;
  std::vector<std::string> corner_violations;

  bool passed() const { return facet_violations.empty() && corner_violations.empty(); }
};

/// Facets against degenerate directions, both ways.
FeatureReport verify_facet_theorem(const Norm& norm, const ConvexPolygon& p, const FeatureTolerances& tol = {});

/// Corners against additivity: every corner must have an additive tangent pair,
/// and every maximal additivity cone must host a corner whose tangents lie in it.
FeatureReport verify_corner_theorem(const Norm& norm, const ConvexPolygon& p, const FeatureTolerances& tol = {});

/// Both sections in one report.
FeatureReport analyze_features(const Norm& norm, const ConvexPolygon& p, const FeatureTolerances& tol = {});

/// Corner symmetry of a centered shape: every corner at x has a partner at -x
/// with tangents -v+-. Returns the number of corners without a partner.
int unpaired_corners(const ConvexPolygon& centered, const FeatureTolerances& tol = {}, double position_tol = 0.02);

struct OptimalityResidual {
  double coefficient_of_variation = 0.0;
  std::vector<double> ratio;  // smoothed |grad u|^2 / C_rho per edge
};

/// Coefficient of variation of |grad u|^2 / C_rho along the boundary, where
/// C_rho is the rho-weighted curvature (turning per unit length weighted by
/// rho + rho''), both smoothed with a Gaussian window of width three edges.
/// Refuses (std::invalid_argument) non-smooth norms and shapes with corners or
/// facets.
OptimalityResidual optimality_residual(const Norm& norm, const ConvexPolygon& p, const EigenSolution& e,
                                       const FeatureTolerances& tol = {});

struct MinkowskiPairResult {
  int pair = 0;
  double convexity_slack[3] = {0, 0, 0};   // alpha = 1/4, 1/2, 3/4; relative to the chord
  double convexity_tol = 0.0;              // relative solver tolerance
  double perimeter_rel_error = 0.0;        // worst over the norms
  double brunn_minkowski_margin = 0.0;     // relative
  bool convex = false;
  bool strict = false;
  bool perimeter_affine = false;
  bool brunn_minkowski = false;
  bool passed() const { return convex && strict && perimeter_affine && brunn_minkowski; }
};

struct MinkowskiReport {
  std::vector<MinkowskiPairResult> pairs;
  int passed = 0;
};

struct MinkowskiOptions {
  EvalOptions eval{3, 16};
  double perimeter_tol = 1e-12;
  double brunn_minkowski_tol = 0.01;
};

/// One random pair: lambda convexity along Minkowski combinations, perimeter
/// affinity for the l1, l2 and l-infinity norms, and lambda^{-1/2} superadditivity.
MinkowskiPairResult minkowski_pair(const ConvexPolygon& p, const ConvexPolygon& q, bool homothetic,
                                   const MinkowskiOptions& opts = {});

MinkowskiReport minkowski_suite(std::uint64_t seed, int n_pairs, const MinkowskiOptions& opts = {});

struct RectangleRow {
  double a = 0.0;
  double A = 0.0;       // pi^2 (a^2/n^2 + n^2/a^2)
  double B = 0.0;       // 1/a + a
  double f_star = 0.0;  // 3 A^{1/3} B^{2/3}
  double lambda_numeric = 0.0;
  double lambda_rel_error = 0.0;
  double f_star_numeric = 0.0;
};

struct RectangleReport {
  double n = 1.0;
  std::vector<RectangleRow> rows;
  std::size_t argmin = 0;
  bool argmin_away_from_one = false;
  double max_lambda_rel_error = 0.0;
};

/// Rectangles [0, n/a] x [0, a/n] under rho(x) = |x1|/n + n|x2|.
RectangleReport counterexample_rectangles(double n, const std::vector<double>& a_grid, bool cross_check = true,
                                          int base_cells = 8);

struct PerimeterDerivativeReport {
  Vec2 direction;
  double gap = 0.0;            // theta+ - theta-
  double bump_variation = 0.0; // integral of |psi'|
  double predicted = 0.0;      // gap / 2 * bump_variation
  double quotients[3] = {0, 0, 0};
  double extrapolated = 0.0;
  double rel_error = 0.0;
  bool passed = false;
};

/// Pushes the facet outward by s psi for s in {1e-2, 5e-3, 2.5e-3}, with psi the
/// piecewise-linear bump through `heights` at evenly spaced knots across the
/// facet (zero at both ends), and compares the extrapolated right derivative
/// of P with the one-sided derivative formula. Throws if p has no facet.
PerimeterDerivativeReport perimeter_derivative_check(const Norm& norm, const ConvexPolygon& p, const Facet& facet,
                                                     const std::vector<double>& heights = {0.0, 1.0, 0.0});

}  // namespace drumshape
