"""
Incremental Delaunay triangulation in the plane and in space.

Points are inserted one at a time (Bowyer-Watson): the cells whose
circumsphere contains the new point form a star-shaped cavity that is
re-triangulated by coning its boundary to the point. The convex hull is
closed off with cells through a symbolic vertex at infinity, so points outside
the current hull need no special case.

Cospherical ties are broken by ``in_sphere_sos`` keyed on the input index,
which makes the output a function of the input order only.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import cKDTree

from src.errors import AllCoplanar, DegenerateSimplex, TooFewPoints
from src.geometry.predicates import in_sphere_sos, orient, orient2d, orient3d
from src.geometry.primitives import FloatArray, as_points

logger = logging.getLogger(__name__)

INFINITE = -1

IntArray = NDArray[np.int64]

Simplex = tuple[int, ...]


@dataclass(frozen=True)
class DelaunayComplex:
    """
    Delaunay triangulation of a point set.

    ``cells`` holds the d-simplices as sorted vertex ids, in lexicographic
    order. ``neighbors[c, k]`` is the cell sharing the facet opposite column
    ``k`` of cell ``c``, or -1 on the convex hull.
    """

    points: FloatArray
    cells: IntArray
    neighbors: IntArray
    _faces: dict[int, IntArray] = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def num_points(self) -> int:
        return int(self.points.shape[0])

    def simplices(self, k: int) -> IntArray:
        """All k-simplices as a lexicographically sorted ``(m, k+1)`` array."""
        if not 0 <= k <= self.dim:
            raise ValueError(f"simplex dimension {k} out of range")
        if k not in self._faces:
            if k == self.dim:
                faces = self.cells
            else:
                cols = list(combinations(range(self.dim + 1), k + 1))
                stacked = np.vstack([self.cells[:, list(c)] for c in cols])
                faces = np.unique(stacked, axis=0)
            self._faces[k] = faces
        return self._faces[k]

    def all_simplices(self) -> list[Simplex]:
        out: list[Simplex] = []
        for k in range(self.dim + 1):
            out.extend(tuple(int(v) for v in row) for row in self.simplices(k))
        return out

    def hull_facets(self) -> list[Simplex]:
        """Facets of cells that have no neighbour across them."""
        rows, cols = np.nonzero(self.neighbors < 0)
        out = []
        for r, c in zip(rows, cols):
            cell = self.cells[r]
            out.append(tuple(int(v) for i, v in enumerate(cell) if i != c))
        return sorted(out)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


class _BowyerWatson:
    """Mutable cell soup with adjacency, including cells through ``INFINITE``.

    Every cell is positively oriented when ``INFINITE`` is read as a point
    beyond the hull facet it is attached to.
    """

    def __init__(self, coords: list[tuple[float, ...]], dim: int):
        self.coords = coords
        self.d = dim
        self.verts: dict[int, list[int]] = {}
        self.nbrs: dict[int, list[int]] = {}
        self._next_id = 0
        self._last = -1

    def _new_cell(self, verts: list[int]) -> int:
        cid = self._next_id
        self._next_id += 1
        self.verts[cid] = verts
        self.nbrs[cid] = [-1] * (self.d + 1)
        return cid

    def _link_new(self, cells: list[tuple[int, int]]) -> None:
        """Glue new cells to each other across facets not yet linked.

        ``cells`` pairs each cell with the index of its already-linked facet.
        """
        ridges: dict[frozenset[int], tuple[int, int]] = {}
        for cid, linked in cells:
            vs = self.verts[cid]
            for j in range(self.d + 1):
                if j == linked:
                    continue
                key = frozenset(v for k, v in enumerate(vs) if k != j)
                other = ridges.pop(key, None)
                if other is None:
                    ridges[key] = (cid, j)
                else:
                    oc, oj = other
                    self.nbrs[cid][j] = oc
                    self.nbrs[oc][oj] = cid
        if ridges:
            raise RuntimeError(f"{len(ridges)} unmatched facets after re-triangulation")

    def bootstrap(self, seed: list[int]) -> None:
        pts = [self.coords[v] for v in seed]
        if orient(pts) < 0:
            seed[0], seed[1] = seed[1], seed[0]
        c0 = self._new_cell(list(seed))
        hull = []
        for i in range(self.d + 1):
            vs = list(seed)
            vs[i] = INFINITE
            a, b = [k for k in range(self.d + 1) if k != i][:2]
            vs[a], vs[b] = vs[b], vs[a]
            ic = self._new_cell(vs)
            self.nbrs[c0][i] = ic
            self.nbrs[ic][i] = c0
            hull.append((ic, i))
        self._link_new(hull)
        self._last = c0

    def conflict(self, cid: int, q: int) -> bool:
        vs = self.verts[cid]
        if INFINITE not in vs:
            return in_sphere_sos([self.coords[v] for v in vs], vs, self.coords[q], q) > 0
        k = vs.index(INFINITE)
        pts = [self.coords[v] if v != INFINITE else self.coords[q] for v in vs]
        sign = orient(pts)
        if sign != 0:
            return sign > 0
        # on the hull facet's hyperplane: inside its circumcircle iff inside
        # the circumsphere of the finite cell behind it
        return self.conflict(self.nbrs[cid][k], q)

    def locate(self, q: int) -> int:
        """A cell in conflict with ``q``, found by a visibility walk."""
        qc = self.coords[q]
        cid = self._last if self._last in self.verts else next(iter(self.verts))
        limit = 4 * len(self.verts) + 16
        for step in range(limit):
            vs = self.verts[cid]
            if INFINITE in vs:
                if self.conflict(cid, q):
                    return cid
                cid = self.nbrs[cid][vs.index(INFINITE)]
                continue
            start = step % (self.d + 1)
            for j in range(self.d + 1):
                i = (start + j) % (self.d + 1)
                pts = [self.coords[v] for v in vs]
                pts[i] = qc
                if orient(pts) < 0:
                    cid = self.nbrs[cid][i]
                    break
            else:
                # q lies in the closed cell and is not a vertex, hence strictly
                # inside its circumsphere
                return cid
        logger.debug("Visibility walk exceeded %d steps for point %d; scanning", limit, q)
        for cid in self.verts:
            if self.conflict(cid, q):
                return cid
        raise RuntimeError(f"no cell conflicts with point {q}")

    def insert(self, q: int) -> None:
        start = self.locate(q)
        cavity = {start}
        rejected: set[int] = set()
        boundary: list[tuple[int, int]] = []
        stack = [start]
        while stack:
            cid = stack.pop()
            for i, nb in enumerate(self.nbrs[cid]):
                if nb in cavity:
                    continue
                if nb not in rejected and self.conflict(nb, q):
                    cavity.add(nb)
                    stack.append(nb)
                else:
                    rejected.add(nb)
                    boundary.append((cid, i))

        created = []
        for cid, i in boundary:
            vs = list(self.verts[cid])
            vs[i] = q
            outside = self.nbrs[cid][i]
            nc = self._new_cell(vs)
            self.nbrs[nc][i] = outside
            back = self.nbrs[outside]
            back[back.index(cid)] = nc
            created.append((nc, i))
            if INFINITE not in vs:
                if orient([self.coords[v] for v in vs]) <= 0:
                    raise DegenerateSimplex(f"inserting point {q} produced a flat or inverted cell")
                self._last = nc
        self._link_new(created)
        for cid in cavity:
            del self.verts[cid]
            del self.nbrs[cid]

    def finite_cells(self) -> tuple[IntArray, IntArray]:
        finite = sorted(
            (sorted(vs), cid) for cid, vs in self.verts.items() if INFINITE not in vs
        )
        index = {cid: k for k, (_, cid) in enumerate(finite)}
        cells = np.empty((len(finite), self.d + 1), dtype=np.int64)
        neighbors = np.full((len(finite), self.d + 1), -1, dtype=np.int64)
        for k, (sorted_vs, cid) in enumerate(finite):
            vs = self.verts[cid]
            cells[k] = sorted_vs
            for slot, v in enumerate(sorted_vs):
                nb = self.nbrs[cid][vs.index(v)]
                neighbors[k, slot] = index.get(nb, -1)
        return cells, neighbors


def _collinear3(a: tuple[float, ...], b: tuple[float, ...], c: tuple[float, ...]) -> bool:
    return all(
        orient2d((a[i], a[j]), (b[i], b[j]), (c[i], c[j])) == 0 for i, j in ((0, 1), (1, 2), (0, 2))
    )


def _initial_simplex(coords: list[tuple[float, ...]], d: int) -> list[int]:
    """First d+1 affinely independent points in input order."""
    n = len(coords)
    a, b = coords[0], coords[1]
    if d == 2:
        third = next((k for k in range(2, n) if orient2d(a, b, coords[k]) != 0), None)
        if third is None:
            raise AllCoplanar("all points are collinear")
        return [0, 1, third]
    third = next((k for k in range(2, n) if not _collinear3(a, b, coords[k])), None)
    if third is None:
        raise AllCoplanar("all points are collinear")
    c = coords[third]
    fourth = next((k for k in range(2, n) if orient3d(a, b, c, coords[k]) != 0), None)
    if fourth is None:
        raise AllCoplanar("all points lie in a common plane")
    return [0, 1, third, fourth]


def morton_order(points: FloatArray, bits: int = 10) -> IntArray:
    """Indices sorted along a Z-order curve, which keeps the walks short."""
    lo = points.min(axis=0)
    span = np.maximum(points.max(axis=0) - lo, 1e-300)
    q = ((points - lo) / span * ((1 << bits) - 1)).astype(np.int64)
    d = points.shape[1]
    keys = np.zeros(points.shape[0], dtype=np.int64)
    for bit in range(bits):
        for axis in range(d):
            keys |= ((q[:, axis] >> bit) & 1) << (bit * d + axis)
    return np.argsort(keys, kind="stable")


def delaunay(points: ArrayLike, dim: Optional[int] = None) -> DelaunayComplex:
    """
    Delaunay triangulation of a finite point set in R^2 or R^3.

    Args:
        points: ``(n, d)`` coordinates; a ``PointCloud`` is accepted too
        dim: Expected ambient dimension, checked against the input

    Raises:
        TooFewPoints: If there are fewer than d+1 points.
        AllCoplanar: If the points span less than R^d.
        DegenerateSimplex: If two points coincide.
    """
    pts = as_points(getattr(points, "points", points))
    n, d = pts.shape
    if dim is not None and dim != d:
        raise ValueError(f"points are {d}-dimensional, expected {dim}")
    if d not in (2, 3):
        raise ValueError(f"only d = 2 and d = 3 are supported, got {d}")
    if n < d + 1:
        raise TooFewPoints(f"need at least {d + 1} points in R^{d}, got {n}")
    pairs = cKDTree(pts).query_pairs(1e-12)
    if pairs:
        i, j = min(pairs)
        raise DegenerateSimplex(f"points {i} and {j} coincide")

    coords = [tuple(float(c) for c in row) for row in pts]
    seed = _initial_simplex(coords, d)
    taken = set(seed)
    builder = _BowyerWatson(coords, d)
    builder.bootstrap(list(seed))
    for i in morton_order(pts):
        if int(i) not in taken:
            builder.insert(int(i))
    cells, neighbors = builder.finite_cells()
    logger.info("Delaunay triangulation: %d points, %d cells (d=%d)", n, cells.shape[0], d)
    return DelaunayComplex(points=pts, cells=cells, neighbors=neighbors)
