#include "drumshape/functional.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "drumshape/spectral.hpp"

namespace drumshape {

OptimalScale optimal_scale(double lambda, double perim) {
  if (!(lambda > 0.0) || !(perim > 0.0)) throw std::invalid_argument("optimal_scale needs positive lambda and perimeter");
  // d/dt (lambda t^-2 + P t) = 0  =>  t^3 = 2 lambda / P
  const double t = std::cbrt(2.0 * lambda / perim);
  return {t, 3.0 * std::pow(2.0, -2.0 / 3.0) * std::cbrt(lambda) * std::pow(perim, 2.0 / 3.0)};
}

OptimalScale optimal_scale_scan(double lambda, double perim, double rel_tol) {
  if (!(lambda > 0.0) || !(perim > 0.0)) throw std::invalid_argument("optimal_scale needs positive lambda and perimeter");
  auto g = [&](double t) { return lambda / (t * t) + perim * t; };
  // bracket around the closed form, then golden section on log t
  const double guess = std::cbrt(2.0 * lambda / perim);
  double a = std::log(guess / 10.0);
  double b = std::log(guess * 10.0);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double gc = g(std::exp(c));
  double gd = g(std::exp(d));
  while (b - a > rel_tol) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(std::exp(c));
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(std::exp(d));
    }
  }
  const double t = std::exp(0.5 * (a + b));
  return {t, g(t)};
}

FunctionalValue make_functional_value(double lambda, double perim, double solver_error) {
  FunctionalValue v;
  v.lambda = lambda;
  v.perim = perim;
  v.f = lambda + perim;
  const OptimalScale s = optimal_scale(lambda, perim);
  v.t_star = s.t_star;
  v.f_star = std::abs(s.t_star - 1.0) < 1e-9 ? v.f : s.f_star;
  v.solver_error = solver_error;
  return v;
}

FunctionalValue evaluate(const ConvexPolygon& p, const Norm& norm, const EvalOptions& opts) {
  const ExtrapolatedEigenvalue ev = eigenvalue_extrapolated(p, opts.levels, opts.base_cells);
  return make_functional_value(ev.lambda, perimeter(p, norm), ev.error_estimate);
}

double isoperimetric_score(const ConvexPolygon& p, const Norm& norm) { return perimeter(p, norm) / std::sqrt(area(p)); }

bool AprioriWindow::contains(const ConvexPolygon& p) const {
  const double a = area(p);
  const double l = euclidean_perimeter(p);
  return a >= area_min && a <= area_max && l >= length_min && l <= length_max;
}

AprioriWindow apriori_window(const Norm& norm, double f_bound) {
  if (!(f_bound > 0.0)) throw std::invalid_argument("apriori_window needs a positive functional bound");
  const double fk = std::numbers::pi * kBesselJ01 * kBesselJ01;  // lambda of the unit-area disc
  const double iso = 2.0 * std::sqrt(std::numbers::pi);           // perimeter of the unit-area disc
  // sampled minimum, loosened to stay a lower bound
  const double rho_min = min_on_unit_circle(norm) * (1.0 - 1e-3);
  AprioriWindow w;
  // lambda >= fk / |U| and lambda <= F
  w.area_min = fk / f_bound;
  // rho_min |dU| <= P <= F and |dU| >= iso sqrt|U|
  w.length_max = f_bound / rho_min;
  w.area_max = (w.length_max / iso) * (w.length_max / iso);
  w.length_min = iso * std::sqrt(w.area_min);
  return w;
}

}  // namespace drumshape
