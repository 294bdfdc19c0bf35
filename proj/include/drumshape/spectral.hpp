#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCore>

#include "drumshape/geometry.hpp"

namespace drumshape {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lattice directions: +x, -x, +y, -y.
inline constexpr std::array<Vec2, 4> kLatticeDirections = {Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0, -1}};

/// A lattice link from an interior node that leaves the domain before the
/// next lattice point. `theta` is the distance to the crossing in units of h.
struct BoundaryLink {
  int node = 0;
  int direction = 0;  // index into kLatticeDirections
  double theta = 1.0;
  Vec2 crossing;
  int edge = 0;  // polygon edge hit by the link
};

/// Shortley-Weller finite-difference discretization of -Laplace with zero
/// Dirichlet data on a square lattice x = anchor + h (i, j).
struct GridDiscretization {
  ConvexPolygon polygon;
  double h = 0.0;
  Vec2 anchor;
  std::vector<Vec2> positions;                 // interior nodes
  std::vector<std::array<int, 4>> neighbors;   // interior neighbor index or -1
  std::vector<std::array<double, 4>> arms;     // arm lengths in units of h, in (0, 1]
  std::vector<BoundaryLink> boundary_links;
  Eigen::SparseMatrix<double> matrix;          // nonsymmetric M-matrix

  std::size_t node_count() const { return positions.size(); }
};

/// Requires h < inradius(p) / 4 and at least 9 interior nodes. The lattice is
/// anchored at the lower-left corner of the bounding box unless `anchor` is given.
GridDiscretization discretize(const ConvexPolygon& p, double h, std::optional<Vec2> anchor = std::nullopt);

struct BoundarySample {
  Vec2 point;
  Vec2 normal;         // outward unit normal of the edge
  int edge = 0;
  double arc = 0.0;    // arc-length position along the boundary from vertex 0
  double grad = 0.0;   // |grad u| estimate
  double weight = 0.0; // Euclidean arc-length quadrature weight
};

struct EigenSolution {
  double lambda_h = 0.0;
  std::vector<double> values;  // h^2 sum values^2 = 1, all positive
  double residual = 0.0;       // || A x - lambda x || / || x ||
  int iterations = 0;
  std::vector<BoundarySample> boundary_flux;
};

struct EigenOptions {
  double tol = 1e-10;          // relative change of the eigenvalue between iterations
  double residual_tol = 1e-9;  // relative to lambda
  int max_iters = 5000;
};

/// Smallest eigenpair of the discrete operator by inverse power iteration from
/// the all-ones vector. Throws SolverError on non-convergence.
EigenSolution principal_eigenpair(const GridDiscretization& d, const EigenOptions& opts = {});

/// Vertices whose exterior turning angle exceeds this are treated as corners
/// by the boundary quadrature.
inline constexpr double kQuadratureCornerTurn = 0.2;

/// Fills e.boundary_flux: one sample per boundary link crossing (links of the
/// lattice axis closest to the edge normal), |grad u| from a one-sided
/// quadratic through the crossing and the two nearest nodes, piecewise-linear
/// arc-length weights. Samples within 2h of a corner are replaced by a zero
/// sample at the corner.
void boundary_gradient(const GridDiscretization& d, EigenSolution& e);

/// Discretize, solve and fill the boundary flux in one call.
EigenSolution solve_dirichlet(const ConvexPolygon& p, double h, std::optional<Vec2> anchor = std::nullopt,
                              const EigenOptions& opts = {});

/// Integral of |grad u|^2 over each polygon edge, using the piecewise-linear
/// interpolant of the boundary samples.
std::vector<double> edge_flux(const ConvexPolygon& p, const EigenSolution& e);

/// -sum w |grad u|^2 (v . n) over the boundary samples.
double hadamard_derivative(const EigenSolution& e, const std::function<Vec2(const Vec2&)>& velocity);

/// Uniform spacing that puts `cells` lattice cells across the shorter side of
/// the bounding box, capped at inradius / 5.
double spacing_for(const ConvexPolygon& p, int cells);

struct ExtrapolatedEigenvalue {
  double lambda = 0.0;
  double error_estimate = 0.0;
  double observed_order = 0.0;  // NaN when fewer than three levels or non-monotone
  bool extrapolated = false;    // false when falling back to the finest grid
  std::vector<double> level_values;
  std::vector<double> spacings;
};

/// Grids h, h/2, h/4, ... with h = spacing_for(p, base_cells); Richardson
/// extrapolation assuming O(h^2) error. Falls back to the finest grid value
/// when the observed order is below 1.5.
ExtrapolatedEigenvalue eigenvalue_extrapolated(const ConvexPolygon& p, int levels = 3, int base_cells = 16,
                                               std::optional<Vec2> anchor = std::nullopt,
                                               std::optional<double> base_spacing = std::nullopt);

/// First zero of the Bessel function J0.
inline constexpr double kBesselJ01 = 2.404825557695773;

}  // namespace drumshape
