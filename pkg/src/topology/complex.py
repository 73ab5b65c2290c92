"""
Mutable simplicial complexes over an embedded point table.

Complexes are built once (closed under faces) and afterwards only shrink
through collapses, so the embedding certified at construction time is never
invalidated.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import linprog

from src.config.settings import get_settings
from src.errors import FlatSimplex, NotEmbedded, NotFree, SimplexNotFound
from src.geometry.primitives import FloatArray, as_points

logger = logging.getLogger(__name__)

Simplex = tuple[int, ...]


def canonical(simplex: Iterable[int]) -> Simplex:
    """Sorted tuple of distinct vertex ids."""
    out = tuple(sorted({int(v) for v in simplex}))
    if not out:
        raise ValueError("empty simplex")
    return out


def facets(simplex: Simplex) -> list[Simplex]:
    """Codimension-one faces of a simplex (none for a vertex)."""
    if len(simplex) == 1:
        return []
    return [simplex[:i] + simplex[i + 1:] for i in range(len(simplex))]


def closure(simplices: Iterable[Sequence[int]]) -> set[Simplex]:
    """All nonempty faces of the given simplices."""
    out: set[Simplex] = set()
    for s in simplices:
        s = canonical(s)
        if s in out:
            continue
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return out


@dataclass(frozen=True)
class CollapseRecord:
    """One entry of the deletion log."""

    tau: Simplex
    sigma: Simplex
    removed: tuple[Simplex, ...]


class SimplicialComplex:
    """
    Abstract simplicial complex with vertex coordinates.

    Simplices are sorted vertex-id tuples. ``_cofaces`` maps every simplex to
    its immediate cofaces (one dimension up), which is all the incidence that
    star, link, freeness and collapse need.
    """

    def __init__(self, points: ArrayLike):
        self.points: FloatArray = as_points(points)
        self._by_dim: dict[int, set[Simplex]] = defaultdict(set)
        self._cofaces: dict[Simplex, set[Simplex]] = {}
        self.log: list[CollapseRecord] = []

    @classmethod
    def from_simplices(
        cls, points: ArrayLike, simplices: Iterable[Sequence[int]], certify: bool = True
    ) -> "SimplicialComplex":
        """
        Closure of ``simplices`` over the point table.

        Every maximal simplex must span a flat of its own dimension. With
        ``certify`` the supports of maximal simplices must also meet only in
        their shared faces; subcomplexes of a Delaunay triangulation skip it.

        Raises:
            ValueError: If a simplex references a missing point.
            FlatSimplex: If a simplex is affinely dependent.
            NotEmbedded: If two supports cross (``certify`` only).
        """
        k = cls(points)
        n = k.points.shape[0]
        for s in sorted(closure(simplices), key=lambda s: (len(s), s)):
            if s[-1] >= n or s[0] < 0:
                raise ValueError(f"simplex {s} references a missing point")
            k._add(s)
        maximal = k.maximal_simplices()
        check_ranks(k.points, maximal)
        if certify:
            crossing = embedding_violations(k.points, maximal, first_only=True)
            if crossing:
                raise NotEmbedded(*crossing[0])
        return k

    def _add(self, s: Simplex) -> None:
        self._by_dim[len(s) - 1].add(s)
        self._cofaces[s] = set()
        for f in facets(s):
            self._cofaces[f].add(s)

    def copy(self) -> "SimplicialComplex":
        other = SimplicialComplex(self.points)
        for k, group in self._by_dim.items():
            other._by_dim[k] = set(group)
        other._cofaces = {s: set(c) for s, c in self._cofaces.items()}
        other.log = list(self.log)
        return other

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    def __contains__(self, simplex: object) -> bool:
        if not isinstance(simplex, tuple):
            return False
        return canonical(simplex) in self._cofaces

    def __len__(self) -> int:
        return len(self._cofaces)

    def __iter__(self) -> Iterator[Simplex]:
        for k in sorted(self._by_dim):
            yield from sorted(self._by_dim[k])

    @property
    def ambient_dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def dim(self) -> int:
        """Largest simplex dimension present, -1 when empty."""
        nonempty = [k for k, group in self._by_dim.items() if group]
        return max(nonempty) if nonempty else -1

    def simplices(self, k: int) -> list[Simplex]:
        return sorted(self._by_dim.get(k, ()))

    def count(self, k: int) -> int:
        return len(self._by_dim.get(k, ()))

    def as_set(self) -> set[Simplex]:
        return set(self._cofaces)

    def vertices(self) -> list[int]:
        return [s[0] for s in self.simplices(0)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(group) for k, group in self._by_dim.items())

    def _require(self, simplex: Sequence[int]) -> Simplex:
        s = canonical(simplex)
        if s not in self._cofaces:
            raise SimplexNotFound(s)
        return s

    def cofaces(self, simplex: Sequence[int]) -> list[Simplex]:
        """Immediate cofaces (one dimension up)."""
        return sorted(self._cofaces[self._require(simplex)])

    def star(self, simplex: Sequence[int]) -> set[Simplex]:
        """All cofaces of ``simplex``, itself included."""
        s = self._require(simplex)
        out = {s}
        frontier = [s]
        while frontier:
            nxt = []
            for t in frontier:
                for c in self._cofaces[t]:
                    if c not in out:
                        out.add(c)
                        nxt.append(c)
            frontier = nxt
        return out

    def top_cofaces(self, simplex: Sequence[int], k: int) -> list[Simplex]:
        """Cofaces of dimension ``k``."""
        return sorted(s for s in self.star(simplex) if len(s) == k + 1)

    def link(self, simplex: Sequence[int]) -> "SimplicialComplex":
        """``{sigma minus tau : sigma in Star(tau), sigma != tau}`` as a complex."""
        s = self._require(simplex)
        rest = [tuple(v for v in t if v not in s) for t in self.star(s) if t != s]
        return SimplicialComplex.from_simplices(self.points, rest, certify=False)

    def is_maximal(self, simplex: Simplex) -> bool:
        return not self._cofaces[simplex]

    def maximal_simplices(self) -> list[Simplex]:
        return sorted((s for s, c in self._cofaces.items() if not c), key=lambda s: (len(s), s))

    def is_free(self, simplex: Sequence[int]) -> Optional[Simplex]:
        """
        The unique inclusion-maximal proper coface, if there is exactly one.

        Returns ``None`` when the star has several maximal elements or when the
        simplex itself is maximal.
        """
        s = self._require(simplex)
        maximal = [t for t in self.star(s) if not self._cofaces[t]]
        if len(maximal) == 1 and maximal[0] != s:
            return maximal[0]
        return None

    def boundary(self) -> "SimplicialComplex":
        """
        Closure of the (d-1)-simplices with fewer than two d-cofaces together
        with every maximal simplex of dimension below d-1 (d = ambient dimension).
        """
        d = self.ambient_dim
        seeds = [
            s for s in self._by_dim.get(d - 1, ()) if len(self._cofaces[s]) < 2
        ]
        seeds.extend(s for s, c in self._cofaces.items() if not c and len(s) < d)
        return SimplicialComplex.from_simplices(self.points, seeds, certify=False)

    def components(self) -> list[set[int]]:
        """Vertex sets of the connected components."""
        parent = {v: v for v in self.vertices()}

        def find(v: int) -> int:
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for a, b in self._by_dim.get(1, ()):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        groups: dict[int, set[int]] = defaultdict(set)
        for v in parent:
            groups[find(v)].add(v)
        return sorted(groups.values(), key=min)

    def coordinates(self, simplex: Sequence[int]) -> FloatArray:
        return self.points[list(simplex)]

    # ------------------------------------------------------------------
    # Mutation
    # ------------------------------------------------------------------

    def remove_star(self, simplex: Sequence[int]) -> list[Simplex]:
        """Delete ``simplex`` and all its cofaces; returns what was removed."""
        removed = sorted(self.star(simplex), key=lambda s: (-len(s), s))
        for s in removed:
            for f in facets(s):
                if f in self._cofaces:
                    self._cofaces[f].discard(s)
            del self._cofaces[s]
            self._by_dim[len(s) - 1].discard(s)
        return removed

    def collapse(self, simplex: Sequence[int]) -> CollapseRecord:
        """
        Elementary collapse of a free simplex.

        Raises:
            SimplexNotFound: If ``simplex`` is not in the complex.
            NotFree: If it has no unique maximal proper coface.
        """
        tau = self._require(simplex)
        sigma = self.is_free(tau)
        if sigma is None:
            raise NotFree(tau)
        removed = self.remove_star(tau)
        record = CollapseRecord(tau=tau, sigma=sigma, removed=tuple(removed))
        self.log.append(record)
        logger.debug("collapsed %s into %s (%d simplices removed)", tau, sigma, len(removed))
        return record

    def replay(self, base: "SimplicialComplex") -> "SimplicialComplex":
        """Apply this complex's deletion log to a copy of ``base``."""
        out = base.copy()
        for record in self.log[len(base.log):]:
            out.collapse(record.tau)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.as_set() == other.as_set() and np.array_equal(self.points, other.points)

    def __repr__(self) -> str:
        counts = ", ".join(f"{self.count(k)}x{k}" for k in range(self.dim + 1))
        return f"SimplicialComplex({counts})"


# ----------------------------------------------------------------------
# Canonical embedding
# ----------------------------------------------------------------------

# objective value above which a linear program reports a crossing
CROSSING_TOL = 1e-7


def check_ranks(points: FloatArray, simplices: Sequence[Simplex]) -> None:
    """
    Require every simplex to span a flat of its own dimension.

    Raises:
        FlatSimplex: For the first affinely dependent simplex.
    """
    tol = get_settings().degeneracy_tol
    d = points.shape[1]
    by_size: dict[int, list[Simplex]] = defaultdict(list)
    for s in simplices:
        if len(s) > 1:
            by_size[len(s)].append(s)
    for k, group in sorted(by_size.items()):
        if k - 1 > d:
            raise FlatSimplex(group[0], d)
        ids = np.asarray(group, dtype=np.int64)
        edges = points[ids[:, 1:]] - points[ids[:, :1]]
        s = np.linalg.svd(edges, compute_uv=False)
        scale = np.maximum(s[:, 0], 1.0)
        rank = np.sum(s > tol * scale[:, np.newaxis], axis=1)
        bad = np.flatnonzero(rank < k - 1)
        if bad.size:
            raise FlatSimplex(group[int(bad[0])], int(rank[bad[0]]))


def _one_sided(points: FloatArray, a: Simplex, b: Simplex, tol: float) -> bool:
    """``b`` touches the hyperplane spanned by ``a`` only in their shared vertices."""
    d = points.shape[1]
    if len(a) != d or d < 2:
        return False
    base = points[a[0]]
    normal = np.linalg.svd(points[list(a[1:])] - base)[2][-1]
    others = [v for v in b if v not in a]
    signed = (points[others] - base) @ normal
    return bool(np.all(signed > tol) or np.all(signed < -tol))


def _opposite_apexes(points: FloatArray, a: Simplex, b: Simplex, tol: float) -> bool:
    """Two k-simplices sharing a facet meet only in it."""
    shared = [v for v in a if v in b]
    (p,) = [v for v in a if v not in b]
    (q,) = [v for v in b if v not in a]
    base = points[shared[0]]
    basis = np.linalg.svd(points[[v for v in a if v != a[0]]] - points[a[0]], full_matrices=False)[2]
    apex_q = points[q] - base
    if np.linalg.norm(apex_q - basis.T @ (basis @ apex_q)) > tol:
        return True
    local = (points[shared] - base) @ basis.T
    if len(shared) == 1:
        normal = np.ones(1)
    else:
        normal = np.linalg.svd(local[1:] - local[0])[2][-1]
    sp = float(((points[p] - base) @ basis.T) @ normal)
    sq = float((apex_q @ basis.T) @ normal)
    return sp * sq < 0


def _linear_program_proper(points: FloatArray, a: Simplex, b: Simplex) -> bool:
    """
    Largest total barycentric weight on unshared vertices over common points.

    Barycentric coordinates of a nondegenerate simplex are unique, so the
    supports meet inside their shared face exactly when that weight is zero
    (or when they do not meet at all).
    """
    d = points.shape[1]
    ka, kb = len(a), len(b)
    A_eq = np.zeros((d + 2, ka + kb))
    A_eq[:d, :ka] = points[list(a)].T
    A_eq[:d, ka:] = -points[list(b)].T
    A_eq[d, :ka] = 1.0
    A_eq[d + 1, ka:] = 1.0
    b_eq = np.zeros(d + 2)
    b_eq[d:] = 1.0
    c = -np.array([0.0 if v in b else 1.0 for v in a] + [0.0 if v in a else 1.0 for v in b])
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status == 2:
        return True
    if not res.success:
        logger.warning("Embedding check for %s and %s was inconclusive: %s", a, b, res.message)
        return True
    return -float(res.fun) <= CROSSING_TOL


def _candidate_pairs(points: FloatArray, simplices: Sequence[Simplex], tol: float) -> list[tuple[int, int]]:
    """Index pairs whose bounding boxes overlap, by a sweep along the first axis."""
    lo = np.array([points[list(s)].min(axis=0) for s in simplices]) - tol
    hi = np.array([points[list(s)].max(axis=0) for s in simplices]) + tol
    order = np.argsort(lo[:, 0], kind="stable")
    pairs = []
    for pos, i in enumerate(order):
        for j in order[pos + 1:]:
            if lo[j, 0] > hi[i, 0]:
                break
            if np.all(lo[j] <= hi[i]) and np.all(lo[i] <= hi[j]):
                pairs.append((int(min(i, j)), int(max(i, j))))
    return sorted(pairs)


def embedding_violations(
    points: ArrayLike, simplices: Sequence[Sequence[int]], first_only: bool = False
) -> list[tuple[Simplex, Simplex]]:
    """
    Pairs of simplices whose supports meet outside the support of their shared face.

    Hyperplane side tests settle most pairs; the rest go to a small linear
    program over barycentric coordinates.
    """
    pts = as_points(points)
    tops = sorted({canonical(s) for s in simplices}, key=lambda s: (len(s), s))
    if len(tops) < 2:
        return []
    tol = get_settings().degeneracy_tol * max(1.0, float(np.abs(pts).max()))
    out = []
    for i, j in _candidate_pairs(pts, tops, tol):
        a, b = tops[i], tops[j]
        if _one_sided(pts, a, b, tol) or _one_sided(pts, b, a, tol):
            continue
        shares_facet = len(a) == len(b) > 1 and len(set(a) & set(b)) == len(a) - 1
        proper = _opposite_apexes(pts, a, b, tol) if shares_facet else _linear_program_proper(pts, a, b)
        if not proper:
            out.append((a, b))
            if first_only:
                break
    return out
