"""
Alpha filtration of a Delaunay triangulation.

The filtration value of a Delaunay simplex is the smallest r for which its
Voronoi face meets the r-offset of the points. Values are kept squared so
that thresholding compares radii without square roots.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.geometry.primitives import FloatArray, circumspheres
from src.topology.complex import SimplicialComplex
from src.triangulation.delaunay import DelaunayComplex, IntArray, Simplex

logger = logging.getLogger(__name__)

# relative margin below which a vertex counts as strictly inside a circumsphere
ATTACH_RTOL = 1e-12


@dataclass(frozen=True)
class AlphaComplex:
    """A Delaunay complex with per-simplex squared filtration values."""

    delaunay: DelaunayComplex
    simplices: list[IntArray]
    alpha2: list[FloatArray]

    @property
    def dim(self) -> int:
        return self.delaunay.dim

    @property
    def points(self) -> FloatArray:
        return self.delaunay.points

    def value2(self, simplex: Simplex) -> float:
        """Squared filtration value of one simplex."""
        k = len(simplex) - 1
        rows = self.simplices[k]
        key = np.asarray(sorted(simplex), dtype=np.int64)
        lo, hi = 0, rows.shape[0]
        # rows are lexicographically sorted
        while lo < hi:
            mid = (lo + hi) // 2
            row = rows[mid]
            if tuple(row) < tuple(key):
                lo = mid + 1
            else:
                hi = mid
        if lo == rows.shape[0] or not np.array_equal(rows[lo], key):
            raise KeyError(f"{tuple(simplex)} is not a Delaunay simplex")
        return float(self.alpha2[k][lo])

    def value(self, simplex: Simplex) -> float:
        return math.sqrt(self.value2(simplex))

    def sublevel(self, alpha: float) -> list[Simplex]:
        """Simplices with filtration value at most ``alpha``."""
        if alpha < 0:
            raise ValueError("alpha must be nonnegative")
        threshold = math.inf if math.isinf(alpha) else alpha * alpha
        out: list[Simplex] = []
        for rows, values in zip(self.simplices, self.alpha2):
            for row in rows[values <= threshold]:
                out.append(tuple(int(v) for v in row))
        return out

    def listing(self) -> list[str]:
        """Human-readable rows ``dim v0 v1 ... alpha2``."""
        lines = []
        for k, (rows, values) in enumerate(zip(self.simplices, self.alpha2)):
            for row, a2 in zip(rows, values):
                ids = " ".join(str(int(v)) for v in row)
                lines.append(f"{k} {ids} {float(a2)!r}")
        return lines


def _coface_pairs(faces: IntArray, cofaces: IntArray) -> tuple[IntArray, IntArray, IntArray]:
    """For every (face, coface) incidence: face row, coface row, opposite vertex."""
    index = {tuple(int(v) for v in row): i for i, row in enumerate(faces)}
    k1 = cofaces.shape[1]
    face_idx, coface_idx, opposite = [], [], []
    for c, row in enumerate(cofaces):
        ids = [int(v) for v in row]
        for drop in range(k1):
            face = tuple(ids[:drop] + ids[drop + 1:])
            face_idx.append(index[face])
            coface_idx.append(c)
            opposite.append(ids[drop])
    return (
        np.asarray(face_idx, dtype=np.int64),
        np.asarray(coface_idx, dtype=np.int64),
        np.asarray(opposite, dtype=np.int64),
    )


def alpha_values(dt: DelaunayComplex) -> AlphaComplex:
    """
    Filtration values for every simplex of ``dt``.

    A d-simplex gets its squared circumradius. A lower simplex whose smallest
    circumsphere has no vertex of an immediate coface strictly inside it keeps
    its own squared circumradius (its circumcenter lies in its Voronoi face);
    otherwise it inherits the minimum over its immediate cofaces.
    """
    d = dt.dim
    pts = dt.points
    simplices = [dt.simplices(k) for k in range(d + 1)]
    values: list[FloatArray] = [np.empty(0)] * (d + 1)

    _, top = circumspheres(pts, simplices[d])
    flat = np.isnan(top)
    if np.any(flat):
        logger.warning("%d numerically flat cells get an infinite alpha value", int(flat.sum()))
        top = np.where(flat, np.inf, top)
    values[d] = top

    for k in range(d - 1, -1, -1):
        faces = simplices[k]
        centers, rho2 = circumspheres(pts, faces)
        rho2 = np.where(np.isnan(rho2), np.inf, rho2)
        face_idx, coface_idx, opposite = _coface_pairs(faces, simplices[k + 1])

        diff = pts[opposite] - centers[face_idx]
        dist2 = np.einsum("ij,ij->i", diff, diff)
        inside = dist2 < rho2[face_idx] * (1.0 - ATTACH_RTOL)
        attached = np.zeros(faces.shape[0], dtype=bool)
        np.logical_or.at(attached, face_idx, inside)
        inherited = np.full(faces.shape[0], np.inf)
        np.minimum.at(inherited, face_idx, values[k + 1][coface_idx])

        values[k] = np.where(attached, inherited, rho2)
        logger.debug("alpha values: %d %d-simplices, %d attached", faces.shape[0], k, int(attached.sum()))

    return AlphaComplex(delaunay=dt, simplices=simplices, alpha2=values)


def alpha_complex(complex_: AlphaComplex, alpha: float) -> SimplicialComplex:
    """Sublevel complex ``Del(P, alpha)`` as a mutable simplicial complex."""
    return SimplicialComplex.from_simplices(complex_.points, complex_.sublevel(alpha), certify=False)

