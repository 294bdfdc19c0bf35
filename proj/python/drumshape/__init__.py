"""Planar shape optimization of lambda + rho-perimeter over convex polygons.

Polygons are lists of (x, y) vertices. Norms are built from the same spec
strings as the command line, e.g. ``Norm("p:2")`` or ``Norm("wl1:1/3,3")``.
"""

import json

from ._core import (
    Norm,
    SolverError,
    area,
    canonical_polygon,
    hausdorff_distance,
    minkowski_sum,
    optimal_scale,
    polygon_csv,
    polygon_svg,
    read_polygon_csv,
    regular_polygon,
)
from . import _core

__version__ = "0.1.0"

__all__ = [
    "Norm",
    "SolverError",
    "analyze",
    "area",
    "canonical_polygon",
    "eigenvalue",
    "evaluate",
    "hausdorff_distance",
    "minimize",
    "minkowski_suite",
    "minkowski_sum",
    "optimal_scale",
    "polygon_csv",
    "polygon_svg",
    "read_polygon_csv",
    "rectangle_family",
    "regular_polygon",
]


def eigenvalue(polygon, levels=3, base_cells=16):
    """Extrapolated principal Dirichlet eigenvalue with its error estimate."""
    return json.loads(_core._eigenvalue(polygon, levels, base_cells))


def evaluate(polygon, norm, levels=3, base_cells=16):
    """lambda, perim, f, t_star, f_star and solver_error of a polygon."""
    return json.loads(_core._evaluate(polygon, norm, levels, base_cells))


def minimize(norm, k=64, starts=4, max_iters=400, seed=1, levels=3, base_cells=16):
    """Best start of the multi-start optimizer; final_shape is dilated to t_star."""
    return json.loads(_core._minimize(norm, k, starts, max_iters, seed, levels, base_cells))


def analyze(norm, polygon):
    return json.loads(_core._analyze(norm, polygon))


def rectangle_family(n, a_grid, cross_check=True):
    return json.loads(_core._rectangles(n, list(a_grid), cross_check))


def minkowski_suite(seed=1, pairs=100):
    return json.loads(_core._minkowski_suite(seed, pairs))
