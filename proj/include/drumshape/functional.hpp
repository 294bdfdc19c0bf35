#pragma once

#include "drumshape/geometry.hpp"
#include "drumshape/norm.hpp"

namespace drumshape {

/// F = lambda + P together with the best dilation of the shape.
struct FunctionalValue {
  double lambda = 0.0;
  double perim = 0.0;
  double f = 0.0;
  double t_star = 1.0;
  double f_star = 0.0;
  double solver_error = 0.0;  // extrapolation error estimate of lambda
};

struct OptimalScale {
  double t_star = 1.0;
  double f_star = 0.0;
};

/// Minimizes t -> lambda / t^2 + t P. Throws std::invalid_argument unless both are positive.
OptimalScale optimal_scale(double lambda, double perim);

/// Golden-section scan of t -> lambda / t^2 + t P over [t_star/10, 10 t_star];
/// independent check of optimal_scale.
OptimalScale optimal_scale_scan(double lambda, double perim, double rel_tol = 1e-12);

/// Fills the derived fields from lambda and perim.
FunctionalValue make_functional_value(double lambda, double perim, double solver_error = 0.0);

struct EvalOptions {
  int levels = 3;
  int base_cells = 16;
};

FunctionalValue evaluate(const ConvexPolygon& p, const Norm& norm, const EvalOptions& opts = {});

/// P(p) / sqrt(|p|).
double isoperimetric_score(const ConvexPolygon& p, const Norm& norm);

/// Bounds c1 <= |U| <= c2, c3 <= |dU| <= c4 (Euclidean perimeter) that every
/// U with F(U) <= f_bound must satisfy, from Faber-Krahn and the isoperimetric
/// inequality.
struct AprioriWindow {
  double area_min = 0.0;
  double area_max = 0.0;
  double length_min = 0.0;
  double length_max = 0.0;

  bool contains(const ConvexPolygon& p) const;
};

AprioriWindow apriori_window(const Norm& norm, double f_bound);

}  // namespace drumshape
