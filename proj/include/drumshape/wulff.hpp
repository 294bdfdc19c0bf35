#pragma once

#include "drumshape/geometry.hpp"
#include "drumshape/norm.hpp"

namespace drumshape {

/// Intersection of the half-planes { x : x . u <= rho(u) } over `n_directions`
/// uniformly spaced unit vectors u, plus every kink direction of rho (the
/// vertex directions of a polygonal unit ball), which makes the result exact
/// for piecewise-linear norms.
ConvexPolygon wulff_shape(const Norm& norm, int n_directions = 256);

/// Minimizer of the rho-perimeter at fixed area when rho measures boundary
/// tangents: the Wulff set turned by a quarter turn. Coincides with
/// wulff_shape for norms invariant under the quarter turn.
ConvexPolygon isoperimetric_shape(const Norm& norm, int n_directions = 256);

}  // namespace drumshape
