"""
Upper and lower facets of d-simplices relative to a manifold.

A facet is upper when its outward normal (pointing away from the simplex)
makes a positive dot product with the manifold normal at the projection of
the facet's barycenter. For a non-vertical facet the sign does not depend on
the point of the facet used, so one evaluation per facet decides it.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.config.settings import get_settings
from src.errors import DegenerateSimplex, OutsideTube, VerticalFacet
from src.geometry.predicates import orient
from src.geometry.primitives import FloatArray, as_points
from src.manifolds.base import AnalyticManifold

logger = logging.getLogger(__name__)

Simplex = tuple[int, ...]


class FacetSide(str, Enum):
    """Which skin of its simplex a facet lies on."""

    UPPER = "upper"
    LOWER = "lower"
    BOTH = "both"


def facet_opposite(sigma: Simplex, i: int) -> Simplex:
    return sigma[:i] + sigma[i + 1:]


def outward_facet_normals(points: FloatArray, cells: NDArray[np.int64]) -> FloatArray:
    """
    Unit outward normals of every facet of every cell.

    Returns:
        ``(m, d+1, d)`` array; entry ``[c, i]`` belongs to the facet opposite
        column ``i`` of cell ``c``.
    """
    m, k1 = cells.shape
    d = points.shape[1]
    out = np.empty((m, k1, d))
    for i in range(k1):
        cols = [j for j in range(k1) if j != i]
        base = points[cells[:, cols[0]]]
        if d == 2:
            e = points[cells[:, cols[1]]] - base
            n = np.column_stack([-e[:, 1], e[:, 0]])
        else:
            n = np.cross(points[cells[:, cols[1]]] - base, points[cells[:, cols[2]]] - base)
        to_opposite = points[cells[:, i]] - base
        flip = np.einsum("ij,ij->i", n, to_opposite) > 0
        n[flip] *= -1.0
        norms = np.linalg.norm(n, axis=1)
        out[:, i, :] = n / np.where(norms > 0, norms, 1.0)[:, np.newaxis]
    return out


@dataclass
class SideTable:
    """
    Facet sides for a batch of d-simplices.

    ``upper[r, i]`` is True when the facet opposite vertex ``i`` of
    ``simplices[r]`` is an upper facet. ``dots`` keeps the signed values the
    decision was made from.
    """

    simplices: list[Simplex]
    upper: NDArray[np.bool_]
    dots: FloatArray
    index: dict[Simplex, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.index:
            self.index = {s: r for r, s in enumerate(self.simplices)}

    def __contains__(self, sigma: object) -> bool:
        return sigma in self.index

    def sides(self, sigma: Simplex) -> dict[Simplex, FacetSide]:
        r = self.index[sigma]
        return {
            facet_opposite(sigma, i): FacetSide.UPPER if up else FacetSide.LOWER
            for i, up in enumerate(self.upper[r])
        }

    def above(self, sigma: Simplex) -> list[Simplex]:
        r = self.index[sigma]
        return [facet_opposite(sigma, i) for i, up in enumerate(self.upper[r]) if up]

    def below(self, sigma: Simplex) -> list[Simplex]:
        r = self.index[sigma]
        return [facet_opposite(sigma, i) for i, up in enumerate(self.upper[r]) if not up]

    def side_of(self, sigma: Simplex, facet: Simplex) -> FacetSide:
        r = self.index[sigma]
        (i,) = [j for j, v in enumerate(sigma) if v not in facet]
        return FacetSide.UPPER if self.upper[r, i] else FacetSide.LOWER

    def vertical_facets(self) -> list[Simplex]:
        rows, cols = np.nonzero(self.dots == 0.0)
        return sorted({facet_opposite(self.simplices[r], c) for r, c in zip(rows, cols)})


def compute_side_table(
    points: ArrayLike,
    simplices: Iterable[Sequence[int]],
    reference: Optional[AnalyticManifold],
    strict: bool = True,
) -> SideTable:
    """
    Facet sides of many d-simplices at once.

    Args:
        points: Vertex coordinate table
        simplices: d-simplices as vertex-id sequences
        reference: The manifold to measure against. ``None`` selects each
            simplex's own reference hyperplane: the hyperplane spanned by its
            lexicographically smallest facet, oriented by that facet's
            outward normal.
        strict: Raise on vertical facets and tube violations instead of
            leaving them to the caller

    Raises:
        DegenerateSimplex: If a simplex is flat.
        VerticalFacet: In strict mode, for a facet whose normal is orthogonal
            to the manifold normal.
        OutsideTube: In strict mode, if a facet barycenter is not within the reach.
    """
    pts = as_points(points)
    sims = [tuple(sorted(int(v) for v in s)) for s in simplices]
    d = pts.shape[1]
    if not sims:
        return SideTable(simplices=[], upper=np.zeros((0, d + 1), dtype=bool), dots=np.zeros((0, d + 1)))
    cells = np.asarray(sims, dtype=np.int64)
    if cells.shape[1] != d + 1:
        raise ValueError(f"expected {d}-simplices, got {cells.shape[1] - 1}-simplices")
    for s in sims:
        if orient([tuple(pts[v]) for v in s]) == 0:
            raise DegenerateSimplex(f"simplex {s} is flat")

    normals_out = outward_facet_normals(pts, cells)
    if reference is None:
        # lexicographically smallest facet of a sorted simplex omits the last vertex
        manifold_normals = np.repeat(normals_out[:, d:d + 1, :], d + 1, axis=1)
    else:
        bary = (pts[cells].sum(axis=1)[:, np.newaxis, :] - pts[cells]) / d
        proj = reference.project_many(bary.reshape(-1, d), check=False)
        far = proj.distances >= reference.reach
        if strict and np.any(far):
            r = int(np.flatnonzero(far)[0]) // (d + 1)
            raise OutsideTube(sims[r], "facet barycenter is not within the reach of the manifold")
        manifold_normals = proj.normals.reshape(cells.shape[0], d + 1, d)

    dots = np.einsum("mkd,mkd->mk", normals_out, manifold_normals)
    band = get_settings().vertical_band
    if strict and np.any(dots == 0.0):
        rows, cols = np.nonzero(dots == 0.0)
        facet = facet_opposite(sims[int(rows[0])], int(cols[0]))
        raise VerticalFacet(facet, "facet normal is orthogonal to the manifold normal")
    near = (np.abs(dots) <= band) & (dots != 0.0)
    if np.any(near):
        rows, cols = np.nonzero(near)
        for r, c in zip(rows[:5], cols[:5]):
            logger.warning(
                "NearVertical: facet %s of %s has N.n = %.3g inside the +/-%.1g band",
                facet_opposite(sims[r], int(c)), sims[r], dots[r, c], band,
            )
    return SideTable(simplices=sims, upper=dots > 0, dots=dots)


def facet_sides(
    points: ArrayLike, sigma: Sequence[int], reference: Optional[AnalyticManifold]
) -> dict[Simplex, FacetSide]:
    """Upper/lower label for each facet of one d-simplex."""
    table = compute_side_table(points, [sigma], reference)
    return table.sides(table.simplices[0])


def below_relation(
    points: ArrayLike,
    sigma0: Sequence[int],
    sigma1: Sequence[int],
    reference: AnalyticManifold,
) -> bool:
    """
    True when ``sigma0`` lies below ``sigma1`` across their common facet.

    That is, the shared facet is upper in ``sigma0`` and lower in ``sigma1``;
    exactly one of the two orderings holds.
    """
    a, b = tuple(sorted(sigma0)), tuple(sorted(sigma1))
    shared = tuple(v for v in a if v in b)
    if len(shared) != len(a) - 1:
        raise ValueError(f"{a} and {b} do not share a facet")
    table = compute_side_table(points, [a, b], reference)
    side_a = table.side_of(a, shared)
    side_b = table.side_of(b, shared)
    if side_a == side_b:
        raise VerticalFacet(shared, "both cofaces put the shared facet on the same side")
    return side_a is FacetSide.UPPER
