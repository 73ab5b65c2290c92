"""
Numerical vertical-convexity verification and the upper/lower skins.

A set X is vertically convex relative to M when every normal segment
``m + t n(m)``, ``|t| <= r``, meets X in one interval (or not at all). The
verifier samples m on a witness grid and extracts the 1-D intersection of
each normal segment with X exactly: barycentric inequalities for simplices,
quadratics for balls. The same pass reports how much of the grid is hit,
which is the covering-projection hypothesis.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, Field
from scipy.spatial import cKDTree

from src.config.settings import get_settings
from src.errors import NotVerticallyConvex
from src.geometry.primitives import FloatArray, as_points
from src.manifolds.base import AnalyticManifold, WitnessGrid
from src.topology.complex import SimplicialComplex
from src.vertical.sides import FacetSide, compute_side_table

logger = logging.getLogger(__name__)

Simplex = tuple[int, ...]

MERGE_TOL = 1e-9

# witness coordinates kept in a report
_MAX_LISTED = 20


@dataclass(frozen=True)
class BallUnion:
    """The offset ``P (+) alpha``: closed balls of one radius around the points."""

    centers: FloatArray
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "centers", as_points(self.centers))
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")


class VerticalConvexityReport(BaseModel):
    """Outcome of ``verify_vertical_convexity``."""

    witnesses: int
    segment_radius: float = Field(description="Half-length r of the normal segments examined")
    covered: int = Field(description="Witnesses whose normal segment meets the set")
    coverage: float
    violations: int = Field(description="Witnesses whose segment meets the set in 2+ pieces")
    max_pieces: int
    max_interval_length: float
    violating_points: list[list[float]] = Field(default_factory=list)

    @property
    def vertically_convex(self) -> bool:
        return self.violations == 0

    @property
    def covering_projection(self) -> bool:
        return self.covered == self.witnesses


# ----------------------------------------------------------------------
# Interval extraction
# ----------------------------------------------------------------------


def _cell_intervals(
    vertices: FloatArray, origins: FloatArray, normals: FloatArray
) -> tuple[FloatArray, FloatArray]:
    """
    Parameter interval of ``origins + t normals`` inside one d-simplex.

    Barycentric coordinates are affine in t, so each one gives a half-line
    constraint. Empty intervals come back with ``lo > hi``.
    """
    d = vertices.shape[1]
    A = np.vstack([vertices.T, np.ones(d + 1)])
    inv = np.linalg.inv(A)
    P = np.column_stack([origins, np.ones(origins.shape[0])]) @ inv.T
    Q = np.column_stack([normals, np.zeros(normals.shape[0])]) @ inv.T
    with np.errstate(divide="ignore", invalid="ignore"):
        roots = -P / Q
    lo = np.where(Q > 0, roots, -np.inf).max(axis=1)
    hi = np.where(Q < 0, roots, np.inf).min(axis=1)
    parallel_out = ((Q == 0) & (P < 0)).any(axis=1)
    lo[parallel_out] = np.inf
    return lo, hi


def _facet_hits(vertices: FloatArray, origins: FloatArray, normals: FloatArray) -> FloatArray:
    """Parameter where each line crosses a (d-1)-simplex; NaN when it misses."""
    d = vertices.shape[1]
    n = origins.shape[0]
    A = np.zeros((n, d + 1, d + 1))
    A[:, :d, :d] = vertices.T
    A[:, :d, d] = -normals
    A[:, d, :d] = 1.0
    rhs = np.column_stack([origins, np.ones(n)])
    out = np.full(n, np.nan)
    ok = np.abs(np.linalg.det(A)) > 1e-14
    if not np.any(ok):
        return out
    sol = np.linalg.solve(A[ok], rhs[ok][..., np.newaxis])[..., 0]
    inside = (sol[:, :d] >= -1e-12).all(axis=1)
    t = sol[:, d]
    out[np.flatnonzero(ok)[inside]] = t[inside]
    return out


def _complex_intervals(
    K: SimplicialComplex, grid: WitnessGrid, r: float
) -> dict[int, list[tuple[float, float]]]:
    d = K.ambient_dim
    tree = cKDTree(grid.points)
    found: dict[int, list[tuple[float, float]]] = defaultdict(list)

    pieces: list[tuple[Simplex, bool]] = [(s, True) for s in K.simplices(d)]
    pieces += [(s, False) for s in K.simplices(d - 1) if not K.cofaces(s)]
    for s, full in pieces:
        verts = K.coordinates(s)
        center = verts.mean(axis=0)
        reach_out = float(np.linalg.norm(verts - center, axis=1).max())
        near = tree.query_ball_point(center, r + reach_out)
        if not near:
            continue
        idx = np.asarray(near, dtype=np.int64)
        origins, normals = grid.points[idx], grid.normals[idx]
        if full:
            lo, hi = _cell_intervals(verts, origins, normals)
        else:
            lo = hi = _facet_hits(verts, origins, normals)
        lo, hi = np.maximum(lo, -r), np.minimum(hi, r)
        keep = ~np.isnan(lo) & (lo <= hi)
        for w, a, b in zip(idx[keep], lo[keep], hi[keep]):
            found[int(w)].append((float(a), float(b)))
    return found


def _ball_intervals(
    balls: BallUnion, grid: WitnessGrid, r: float
) -> dict[int, list[tuple[float, float]]]:
    found: dict[int, list[tuple[float, float]]] = defaultdict(list)
    if balls.radius == 0.0:
        return found
    tree = cKDTree(balls.centers)
    for w, near in enumerate(tree.query_ball_point(grid.points, r + balls.radius)):
        if not near:
            continue
        offset = grid.points[w] - balls.centers[near]
        b = offset @ grid.normals[w]
        disc = b * b - (np.einsum("ij,ij->i", offset, offset) - balls.radius**2)
        hit = disc >= 0
        root = np.sqrt(disc[hit])
        lo = np.maximum(-b[hit] - root, -r)
        hi = np.minimum(-b[hit] + root, r)
        for a, c in zip(lo, hi):
            if a <= c:
                found[w].append((float(a), float(c)))
    return found


def merge_intervals(intervals: list[tuple[float, float]], tol: float = MERGE_TOL) -> list[tuple[float, float]]:
    """Union of closed intervals; pieces closer than ``tol`` are joined."""
    merged: list[tuple[float, float]] = []
    for a, b in sorted(intervals):
        if merged and a <= merged[-1][1] + tol:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def _segment_radius(X: Union[SimplicialComplex, BallUnion], manifold: AnalyticManifold) -> float:
    """A tube radius containing X, kept below the reach."""
    if isinstance(X, BallUnion):
        pts, extra = X.centers, X.radius
    else:
        pts = X.points[X.vertices()]
        extra = max(
            (float(np.linalg.norm(X.points[a] - X.points[b])) for a, b in X.simplices(1)),
            default=0.0,
        )
    r = float(manifold.distance(pts).max()) + extra if len(pts) else extra
    if r >= manifold.reach:
        capped = 0.999 * manifold.reach
        logger.warning(
            "Set may leave the tube (bound %.4g >= reach %.4g); examining segments of radius %.4g",
            r, manifold.reach, capped,
        )
        return capped
    return max(r, 1e-12)


def verify_vertical_convexity(
    X: Union[SimplicialComplex, BallUnion],
    manifold: AnalyticManifold,
    grid: Optional[WitnessGrid] = None,
    spacing: Optional[float] = None,
) -> VerticalConvexityReport:
    """
    Check vertical convexity of a complex or a union of balls on a witness grid.

    Args:
        X: A complex (its support is tested) or ``BallUnion``
        manifold: Reference manifold
        grid: Witness grid; built from ``spacing`` when omitted
        spacing: Grid spacing; defaults to the configured ratio of the segment radius

    Returns:
        Violation count, coverage and the largest piece length.
    """
    r = _segment_radius(X, manifold)
    if grid is None:
        settings = get_settings()
        if spacing is None:
            grid = manifold.grid_for(r, settings.witness_ratio, settings.max_witnesses)
        else:
            grid = manifold.grid_for(spacing, 1.0, settings.max_witnesses)

    if isinstance(X, BallUnion):
        found = _ball_intervals(X, grid, r)
    else:
        found = _complex_intervals(X, grid, r)

    violations: list[int] = []
    max_pieces = 0
    longest = 0.0
    for w, intervals in found.items():
        merged = merge_intervals(intervals)
        max_pieces = max(max_pieces, len(merged))
        longest = max(longest, max(b - a for a, b in merged))
        if len(merged) > 1:
            violations.append(w)

    report = VerticalConvexityReport(
        witnesses=len(grid),
        segment_radius=r,
        covered=len(found),
        coverage=len(found) / len(grid) if len(grid) else 0.0,
        violations=len(violations),
        max_pieces=max_pieces,
        max_interval_length=longest,
        violating_points=[grid.points[w].tolist() for w in sorted(violations)[:_MAX_LISTED]],
    )
    logger.info(
        "Vertical convexity: %d/%d witnesses covered, %d violations",
        report.covered, report.witnesses, report.violations,
    )
    return report


# ----------------------------------------------------------------------
# Skins
# ----------------------------------------------------------------------


@dataclass
class Skins:
    """Upper and lower subcomplexes of the boundary, with per-simplex labels."""

    upper: SimplicialComplex
    lower: SimplicialComplex
    labels: dict[Simplex, FacetSide] = field(default_factory=dict)

    @property
    def both(self) -> list[Simplex]:
        return sorted(s for s, side in self.labels.items() if side is FacetSide.BOTH)


def skins_and_subcomplexes(
    K: SimplicialComplex,
    manifold: AnalyticManifold,
    require_convexity: bool = False,
    grid: Optional[WitnessGrid] = None,
) -> Skins:
    """
    Split the boundary of ``K`` into its upper and lower subcomplexes.

    A boundary (d-1)-simplex with one d-coface takes that coface's facet side;
    boundary simplices without a d-coface lie in both skins and are labelled
    ``BOTH``.

    Raises:
        VerticalFacet: If a boundary facet is vertical.
        NotVerticallyConvex: When ``require_convexity`` is set and verification fails.
    """
    if require_convexity:
        report = verify_vertical_convexity(K, manifold, grid=grid)
        if not report.vertically_convex:
            raise NotVerticallyConvex(report.violations)

    d = K.ambient_dim
    boundary = K.boundary()
    seeds = boundary.maximal_simplices()
    owners = {s: K.cofaces(s) for s in seeds if len(s) == d}
    tops = sorted({c[0] for c in owners.values() if c})
    table = compute_side_table(K.points, tops, manifold)

    labels: dict[Simplex, FacetSide] = {}
    for s in seeds:
        cof = owners.get(s, [])
        labels[s] = table.side_of(cof[0], s) if cof else FacetSide.BOTH

    upper = [s for s, side in labels.items() if side is not FacetSide.LOWER]
    lower = [s for s, side in labels.items() if side is not FacetSide.UPPER]
    skins = Skins(
        upper=SimplicialComplex.from_simplices(K.points, upper, certify=False),
        lower=SimplicialComplex.from_simplices(K.points, lower, certify=False),
        labels=labels,
    )
    logger.info(
        "Skins: %d upper, %d lower, %d in both",
        len(upper) - len(skins.both), len(lower) - len(skins.both), len(skins.both),
    )
    return skins


def offset_of(points: ArrayLike, alpha: float) -> BallUnion:
    return BallUnion(centers=as_points(points), radius=alpha)
