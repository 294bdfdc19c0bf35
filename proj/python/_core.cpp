// Python bindings. Reports cross the boundary as JSON text and are decoded in
// the package, so Python sees the same keys as the CLI manifests.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drumshape/features.hpp"
#include "drumshape/functional.hpp"
#include "drumshape/io.hpp"
#include "drumshape/norm.hpp"
#include "drumshape/optimizer.hpp"
#include "drumshape/spectral.hpp"
#include "drumshape/wulff.hpp"

namespace py = pybind11;
using namespace drumshape;

namespace {

using Points = std::vector<std::pair<double, double>>;

ConvexPolygon polygon_of(const Points& pts) {
  std::vector<Vec2> v;
  for (const auto& [x, y] : pts) v.push_back({x, y});
  return ConvexPolygon(std::move(v));
}

Points points_of(const ConvexPolygon& p) {
  Points out;
  for (const Vec2& v : p.vertices()) out.emplace_back(v.x, v.y);
  return out;
}

std::string js(const Json& j) { return j.dump(); }

OptimizerConfig optimizer_config(int k, int starts, int max_iters, std::uint64_t seed, int levels, int base_cells) {
  OptimizerConfig c;
  c.k_angles = k;
  c.n_starts = starts;
  c.max_iters = max_iters;
  c.seed = seed;
  c.grid_levels = levels;
  c.base_cells = base_cells;
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<Norm>(m, "Norm")
      .def(py::init([](const std::string& spec) { return build_norm(spec); }), py::arg("spec"))
      .def("__call__", [](const Norm& n, double x, double y) { return n({x, y}); }, py::arg("x"), py::arg("y"))
      .def("one_sided_derivatives",
           [](const Norm& n, double ex, double ey) {
             const NormProbe p = one_sided_derivatives(n, normalized(Vec2{ex, ey}));
             return std::make_pair(p.theta_minus, p.theta_plus);
           })
      .def("degenerate_directions",
           [](const Norm& n, int n_angles) {
             std::vector<std::pair<double, double>> out;
             for (const auto& d : degenerate_directions(n, n_angles)) out.emplace_back(d.angle, d.gap);
             return out;
           },
           py::arg("n_angles") = 64, "(angle in [0, pi), gap) per degenerate direction")
      .def("additivity_cones",
           [](const Norm& n) {
             std::vector<std::pair<double, double>> out;
             for (const auto& c : additivity_cones(n)) out.emplace_back(c.from, c.to);
             return out;
           })
      .def("is_additive",
           [](const Norm& n, double ax, double ay, double bx, double by) {
             return additivity_on_pair(n, normalized(Vec2{ax, ay}), normalized(Vec2{bx, by}));
           })
      .def("wulff_shape", [](const Norm& n, int dirs) { return points_of(wulff_shape(n, dirs)); },
           py::arg("n_directions") = 256)
      .def("isoperimetric_shape", [](const Norm& n, int dirs) { return points_of(isoperimetric_shape(n, dirs)); },
           py::arg("n_directions") = 256)
      .def("perimeter", [](const Norm& n, const Points& p) { return perimeter(polygon_of(p), n); });

  m.def("canonical_polygon", [](const Points& p) { return points_of(polygon_of(p)); },
        "Counterclockwise vertices without collinear points; raises if not convex.");
  m.def("area", [](const Points& p) { return area(polygon_of(p)); });
  m.def("hausdorff_distance", [](const Points& p, const Points& q) {
    return hausdorff_distance(polygon_of(p), polygon_of(q));
  });
  m.def("minkowski_sum", [](const Points& p, const Points& q) {
    return points_of(minkowski_sum(polygon_of(p), polygon_of(q)));
  });
  m.def("regular_polygon", [](int n, double r) { return points_of(regular_polygon(n, r)); });

  m.def("_eigenvalue", [](const Points& p, int levels, int base_cells) {
    return js(to_json(eigenvalue_extrapolated(polygon_of(p), levels, base_cells)));
  });
  m.def("_evaluate", [](const Points& p, const Norm& n, int levels, int base_cells) {
    return js(to_json(evaluate(polygon_of(p), n, {levels, base_cells})));
  });
  m.def("optimal_scale", [](double lambda, double perim) {
    const OptimalScale s = optimal_scale(lambda, perim);
    return std::make_pair(s.t_star, s.f_star);
  });
  m.def("_minimize", [](const Norm& n, int k, int starts, int max_iters, std::uint64_t seed, int levels,
                        int base_cells) {
    OptimizationTrace t;
    {
      py::gil_scoped_release release;
      t = minimize(n, optimizer_config(k, starts, max_iters, seed, levels, base_cells));
    }
    return js(to_json(t));
  });
  m.def("_analyze", [](const Norm& n, const Points& p) { return js(to_json(analyze_features(n, polygon_of(p)))); });
  m.def("_rectangles", [](double n, const std::vector<double>& grid, bool cross_check) {
    return js(to_json(counterexample_rectangles(n, grid, cross_check)));
  });
  m.def("_minkowski_suite", [](std::uint64_t seed, int pairs) {
    MinkowskiReport r;
    {
      py::gil_scoped_release release;
      r = minkowski_suite(seed, pairs);
    }
    return js(to_json(r));
  });
  m.def("polygon_svg", [](const Points& p) { return polygon_svg(polygon_of(p)); });
  m.def("polygon_csv", [](const Points& p) { return polygon_csv(polygon_of(p)); });
  m.def("read_polygon_csv", [](const std::string& path) { return points_of(read_polygon_csv(path)); });
}
