#include "drumshape/wulff.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace drumshape {

ConvexPolygon wulff_shape(const Norm& norm, int n_directions) {
  if (n_directions < 16) throw std::invalid_argument("wulff_shape needs at least 16 directions");
  std::vector<double> angles;
  for (int k = 0; k < n_directions; ++k) angles.push_back(2.0 * std::numbers::pi * k / n_directions);
  for (const auto& d : degenerate_directions(norm)) {
    angles.push_back(d.angle);
    angles.push_back(d.angle + std::numbers::pi);
  }
  std::sort(angles.begin(), angles.end());
  std::vector<Vec2> normals;
  std::vector<double> offsets;
  for (double a : angles) {
    const Vec2 u = unit_at(a);
    normals.push_back(u);
    offsets.push_back(norm(u));
  }
  const double bound = 4.0 * max_on_unit_circle(norm) / min_on_unit_circle(norm) * max_on_unit_circle(norm) + 1.0;
  return intersect_halfplanes(normals, offsets, bound);
}

ConvexPolygon isoperimetric_shape(const Norm& norm, int n_directions) {
  return rotate(wulff_shape(norm, n_directions), 0.5 * std::numbers::pi);
}

}  // namespace drumshape
