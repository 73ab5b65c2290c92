"""
Angles between simplices and the tangent spaces of a manifold.

The angle of a simplex at a point x of its support is the angle between its
affine hull and the tangent hyperplane at the projection of x. Extremes over
the support are searched on a barycentric lattice and refined by
golden-section search along segments towards the vertices and the centroid,
so they are certified up to the grid, not exactly.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike

from src.config.settings import get_settings
from src.errors import DegenerateSimplex, OutsideTube
from src.geometry.primitives import (
    FloatArray,
    angle_to_hyperplane,
    as_points,
    barycentric_grid,
    circumsphere,
    min_enclosing_sphere,
    simplex_directions,
)
from src.manifolds.base import AnalyticManifold

logger = logging.getLogger(__name__)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AngleExtreme:
    """Extreme angle over a simplex and where it was attained."""

    value: float
    point: FloatArray
    vertex_value: float


def tube_bound(coords: ArrayLike, manifold: AnalyticManifold) -> float:
    """
    Upper bound on the distance from any support point to the manifold.

    Every point of a convex hull is within the enclosing radius of some
    vertex, and the circumradius is at least that radius.
    """
    pts = as_points(coords)
    worst_vertex = float(manifold.distance(pts).max())
    if pts.shape[0] == 1:
        return worst_vertex
    try:
        radius = circumsphere(pts).radius
    except DegenerateSimplex:
        radius = min_enclosing_sphere(pts).radius
    return worst_vertex + radius


def check_tube(simplex: Sequence[int], coords: ArrayLike, manifold: AnalyticManifold) -> float:
    """Return ``tube_bound`` or raise OutsideTube when it reaches the reach."""
    bound = tube_bound(coords, manifold)
    if bound >= manifold.reach:
        raise OutsideTube(
            simplex,
            f"support may reach distance {bound:.4g} from the manifold (reach {manifold.reach:.4g})",
            bound=bound,
        )
    return bound


def angles_at(directions: FloatArray, points: FloatArray, manifold: AnalyticManifold) -> FloatArray:
    """Angle between ``span(directions)`` and the tangent spaces at ``pi(points)``."""
    normals = manifold.project_many(points, check=False).normals
    return angle_to_hyperplane(directions, normals)


def vertex_angles(coords: ArrayLike, manifold: AnalyticManifold) -> FloatArray:
    """Angle of the simplex's affine hull with the tangent space at each vertex."""
    pts = as_points(coords)
    return angles_at(simplex_directions(pts), pts, manifold)


def _golden(f: Callable[[float], float], steps: int) -> tuple[float, float]:
    """Maximise ``f`` on [0, 1]."""
    a, b = 0.0, 1.0
    c = b - _INV_PHI * (b - a)
    e = a + _INV_PHI * (b - a)
    fc, fe = f(c), f(e)
    for _ in range(steps):
        if fc > fe:
            b, e, fe = e, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + _INV_PHI * (b - a)
            fe = f(e)
    t = 0.5 * (a + b)
    return t, f(t)


def _extreme(
    coords: ArrayLike,
    manifold: AnalyticManifold,
    sign: float,
    resolution: Optional[int],
    refine_steps: Optional[int],
) -> AngleExtreme:
    settings = get_settings()
    resolution = settings.angle_grid_resolution if resolution is None else resolution
    refine_steps = settings.angle_refine_steps if refine_steps is None else refine_steps

    pts = as_points(coords)
    k = pts.shape[0] - 1
    directions = simplex_directions(pts)
    if directions.shape[0] == 0:
        raise DegenerateSimplex("angles are undefined for a point")

    at_vertices = angles_at(directions, pts, manifold)
    weights = barycentric_grid(k, resolution)
    grid_points = weights @ pts
    grid = angles_at(directions, grid_points, manifold)
    best = int(np.argmax(sign * grid))
    best_value = float(grid[best])
    best_point = grid_points[best]

    if refine_steps > 0:
        targets = np.vstack([pts, pts.mean(axis=0)])
        origin = best_point.copy()
        for target in targets:
            if np.allclose(target, origin):
                continue

            def along(t: float, target: FloatArray = target) -> float:
                x = origin + t * (target - origin)
                return sign * float(angles_at(directions, x[np.newaxis, :], manifold)[0])

            t, value = _golden(along, refine_steps)
            if value > sign * best_value:
                best_value = sign * value
                best_point = origin + t * (target - origin)

    vertex_value = float(at_vertices.max() if sign > 0 else at_vertices.min())
    return AngleExtreme(value=best_value, point=best_point, vertex_value=vertex_value)


def max_angle_over_support(
    coords: ArrayLike,
    manifold: AnalyticManifold,
    resolution: Optional[int] = None,
    refine_steps: Optional[int] = None,
) -> AngleExtreme:
    """Largest angle between ``Aff(simplex)`` and ``T_{pi(x)} M`` over ``x in Conv``."""
    return _extreme(coords, manifold, 1.0, resolution, refine_steps)


def min_angle_over_support(
    coords: ArrayLike,
    manifold: AnalyticManifold,
    resolution: Optional[int] = None,
    refine_steps: Optional[int] = None,
) -> AngleExtreme:
    """Smallest angle over the support; ``vertex_value`` is the vertex minimum."""
    return _extreme(coords, manifold, -1.0, resolution, refine_steps)


def is_vertical(
    coords: ArrayLike,
    manifold: AnalyticManifold,
    simplex: Optional[Sequence[int]] = None,
) -> bool:
    """
    Whether two support points share a projection onto the manifold.

    Inside the tube this happens exactly when the angle with some tangent
    space reaches pi/2.

    Raises:
        OutsideTube: If the support may leave the region where projection is unique.
    """
    pts = as_points(coords)
    check_tube(simplex if simplex is not None else range(pts.shape[0]), pts, manifold)
    if pts.shape[0] == 1:
        return False
    tol = get_settings().vertical_angle_tol
    extreme = max_angle_over_support(pts, manifold)
    return extreme.value >= math.pi / 2 - tol


@dataclass(frozen=True)
class BatchAngles:
    """Angles of many k-simplices at their vertices and on a barycentric lattice."""

    simplices: list[tuple[int, ...]]
    at_vertices: FloatArray
    on_grid: FloatArray

    @property
    def support_max(self) -> FloatArray:
        return np.maximum(self.at_vertices.max(axis=1), self.on_grid.max(axis=1))

    @property
    def support_min(self) -> FloatArray:
        return np.minimum(self.at_vertices.min(axis=1), self.on_grid.min(axis=1))


def batch_angles(
    points: ArrayLike,
    simplices: Sequence[Sequence[int]],
    manifold: AnalyticManifold,
    resolution: Optional[int] = None,
) -> BatchAngles:
    """
    Vectorised angle evaluation for simplices of one dimension k >= 1.

    One projection call covers every vertex and lattice point, which is what
    makes the hypothesis checks affordable on whole alpha complexes.
    """
    pts = as_points(points)
    sims = [tuple(int(v) for v in s) for s in simplices]
    if not sims:
        empty = np.zeros((0, 0))
        return BatchAngles(simplices=[], at_vertices=empty, on_grid=empty)
    resolution = get_settings().angle_grid_resolution if resolution is None else resolution
    cells = np.asarray(sims, dtype=np.int64)
    m, k1 = cells.shape
    if k1 < 2:
        raise DegenerateSimplex("angles are undefined for a point")
    verts = pts[cells]
    edges = np.transpose(verts[:, 1:, :] - verts[:, :1, :], (0, 2, 1))
    basis, _ = np.linalg.qr(edges)

    weights = barycentric_grid(k1 - 1, resolution)
    lattice = np.einsum("gk,mkd->mgd", weights, verts)
    everything = np.concatenate([verts, lattice], axis=1)
    d = pts.shape[1]
    normals = manifold.project_many(everything.reshape(-1, d), check=False).normals
    normals = normals.reshape(m, -1, d)
    sines = np.linalg.norm(np.einsum("mpd,mdk->mpk", normals, basis), axis=2)
    angles = np.arcsin(np.clip(sines, 0.0, 1.0))
    return BatchAngles(simplices=sims, at_vertices=angles[:, :k1], on_grid=angles[:, k1:])
