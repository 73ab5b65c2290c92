"""
Restricted Delaunay complexes.

``Del_M(P)`` holds the Delaunay simplices whose Voronoi cells meet M, and the
core complex ``DelC(P)`` is the closure of its (d-1)-simplices. A facet's
Voronoi cell is an edge (segment or ray) between the circumcenters of its
cofaces, so the facet belongs to the core complex exactly when M crosses
that edge; crossings are located by a sign scan of M's level function
followed by bisection. Lower-dimensional simplices are found by classifying
a witness grid on M into Voronoi cells; an edge nominated by a near tie on
the grid is kept only once a point of M on its bisector is confirmed.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.spatial import cKDTree

from src.config.settings import get_settings
from src.errors import AllCoplanar, GenericityViolated, TooFewPoints
from src.geometry.primitives import FloatArray, as_points, circumspheres
from src.manifolds.base import AnalyticManifold, WitnessGrid
from src.sampling.sampler import median_spacing
from src.topology.complex import SimplicialComplex, closure
from src.triangulation.delaunay import DelaunayComplex, delaunay
from src.vertical.sides import outward_facet_normals

logger = logging.getLogger(__name__)

Simplex = tuple[int, ...]

WITNESS_TOL = 1e-9
# grid points tried per nominated edge
MAX_EDGE_STARTS = 4


@dataclass(frozen=True)
class Witness:
    """A point of ``V(simplex, P)`` on (or next to) M."""

    point: FloatArray
    parameter: Optional[float] = None
    height: float = 0.0
    verified: bool = True


@dataclass
class RestrictedComplex:
    """A restricted Delaunay complex with one witness per detected simplex."""

    complex: SimplicialComplex
    witnesses: dict[Simplex, Witness] = field(default_factory=dict)
    pure: bool = True
    extras: list[Simplex] = field(default_factory=list)

    def as_set(self) -> set[Simplex]:
        return self.complex.as_set()

    def facets(self) -> list[Simplex]:
        return self.complex.simplices(self.complex.ambient_dim - 1)

    @property
    def unverified(self) -> list[Simplex]:
        """Facets whose witness failed the equidistance or height check."""
        d = self.complex.ambient_dim
        return sorted(s for s, w in self.witnesses.items() if len(s) == d and not w.verified)


@dataclass(frozen=True)
class VoronoiEdges:
    """Dual Voronoi edge of every Delaunay facet; rays are already clipped."""

    facets: list[Simplex]
    starts: FloatArray
    ends: FloatArray
    cells: list[tuple[int, ...]]


def voronoi_edges(dt: DelaunayComplex, manifold: AnalyticManifold) -> VoronoiEdges:
    """
    Voronoi edges of all Delaunay facets.

    Raises:
        GenericityViolated: If a circumcenter lies within the genericity band of M.
    """
    settings = get_settings()
    d = dt.dim
    centers, _ = circumspheres(dt.points, dt.cells)
    heights = manifold.closest(centers).heights
    close = np.flatnonzero(np.abs(heights) <= settings.genericity_tol)
    if close.size:
        c = int(close[0])
        raise GenericityViolated(tuple(int(v) for v in dt.cells[c]), float(heights[c]))

    lo, hi = manifold.bounding_box()
    box_center = 0.5 * (lo + hi)
    half_diag = 0.5 * float(np.linalg.norm(hi - lo))
    pad = settings.ray_clip_factor * (half_diag if manifold.reach_is_infinite else manifold.reach)

    normals = outward_facet_normals(dt.points, dt.cells)
    facets, starts, ends, owners = [], [], [], []
    for c in range(dt.cells.shape[0]):
        for k in range(d + 1):
            other = int(dt.neighbors[c, k])
            if other != -1 and other < c:
                continue
            facets.append(tuple(int(v) for j, v in enumerate(dt.cells[c]) if j != k))
            starts.append(centers[c])
            if other == -1:
                length = float(np.linalg.norm(centers[c] - box_center)) + half_diag + pad
                ends.append(centers[c] + length * normals[c, k])
                owners.append((c,))
            else:
                ends.append(centers[other])
                owners.append((c, other))
    order = sorted(range(len(facets)), key=lambda i: facets[i])
    return VoronoiEdges(
        facets=[facets[i] for i in order],
        starts=np.asarray(starts, dtype=np.float64).reshape(-1, d)[order],
        ends=np.asarray(ends, dtype=np.float64).reshape(-1, d)[order],
        cells=[owners[i] for i in order],
    )


def _first_crossings(
    starts: FloatArray, ends: FloatArray, manifold: AnalyticManifold
) -> tuple[FloatArray, FloatArray]:
    """
    Parameter of the first sign change of M's level function along each edge.

    Returns:
        ``(t, mask)``; ``t`` is NaN where no sign change was seen.
    """
    settings = get_settings()
    m, d = starts.shape
    samples = settings.crossing_samples
    s = np.linspace(0.0, 1.0, samples + 1)
    span = ends - starts
    pts = starts[:, np.newaxis, :] + s[np.newaxis, :, np.newaxis] * span[:, np.newaxis, :]
    signs = np.sign(manifold.level(pts.reshape(-1, d)).reshape(m, samples + 1))
    change = signs[:, :-1] * signs[:, 1:] < 0
    # an exact zero at a sample counts as a change into the next interval
    change |= (signs[:, :-1] == 0) & (signs[:, 1:] != 0)
    found = change.any(axis=1)
    t = np.full(m, np.nan)
    if not np.any(found):
        return t, found
    rows = np.flatnonzero(found)
    first = np.argmax(change[rows], axis=1)
    lo, hi = s[first].copy(), s[first + 1].copy()
    f_lo = signs[rows, first]
    lengths = np.linalg.norm(span[rows], axis=1)
    for _ in range(200):
        if np.all((hi - lo) * lengths <= settings.bisection_tol):
            break
        mid = 0.5 * (lo + hi)
        f_mid = np.sign(manifold.level(starts[rows] + mid[:, np.newaxis] * span[rows]))
        same = f_mid == f_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    t[rows] = 0.5 * (lo + hi)
    return t, found


def _verify(points: FloatArray, tree: cKDTree, simplex: Simplex, w: FloatArray, height: float) -> bool:
    dists = np.linalg.norm(points[list(simplex)] - w, axis=1)
    scale = max(1.0, float(dists.max()))
    nearest, _ = tree.query(w)
    equidistant = float(dists.max() - dists.min()) <= WITNESS_TOL * scale * 100
    closest = float(nearest) >= float(dists.min()) - WITNESS_TOL * scale
    return equidistant and closest and abs(height) <= WITNESS_TOL * scale


def core_delaunay(dt: DelaunayComplex, manifold: AnalyticManifold) -> RestrictedComplex:
    """
    ``DelC(P)``: closure of the Delaunay facets whose Voronoi edge crosses M.

    Raises:
        GenericityViolated: If a Voronoi vertex lies on M within tolerance.
    """
    edges = voronoi_edges(dt, manifold)
    if not edges.facets:
        return RestrictedComplex(complex=SimplicialComplex(dt.points))
    t, found = _first_crossings(edges.starts, edges.ends, manifold)
    tree = cKDTree(dt.points)
    witnesses: dict[Simplex, Witness] = {}
    for i in np.flatnonzero(found):
        w = edges.starts[i] + t[i] * (edges.ends[i] - edges.starts[i])
        height = float(manifold.closest(w).heights[0])
        facet = edges.facets[i]
        witnesses[facet] = Witness(
            point=w,
            parameter=float(t[i]),
            height=height,
            verified=_verify(dt.points, tree, facet, w, height),
        )
    K = SimplicialComplex.from_simplices(dt.points, list(witnesses), certify=False)
    result = RestrictedComplex(complex=K, witnesses=witnesses)
    if result.unverified:
        logger.warning("%d core facets have witnesses that failed verification", len(result.unverified))
    logger.info("Core Delaunay complex: %d of %d facets cross M", len(witnesses), len(edges.facets))
    return result


def _nearest_subsets(
    points: FloatArray, grid: WitnessGrid, tol: float
) -> list[tuple[Simplex, int]]:
    """Near-tie subsets of nearest sample points for every witness, with the witness index."""
    k = min(points.shape[0], 3)
    dist, idx = cKDTree(points).query(grid.points, k=k)
    if k == 1:
        dist, idx = dist[:, np.newaxis], idx[:, np.newaxis]
    out = []
    for w in range(grid.points.shape[0]):
        tie = tuple(int(v) for v, r in zip(idx[w], dist[w]) if r <= dist[w, 0] + tol)
        out.append((tie, w))
    return out


def onto_bisectors(
    manifold: AnalyticManifold,
    starts: FloatArray,
    a: FloatArray,
    b: FloatArray,
    steps: int = 50,
) -> tuple[FloatArray, FloatArray]:
    """
    Walk manifold points onto the bisector of ``a[i]`` and ``b[i]`` along M.

    Each step is a Newton step for ``|x - a|^2 - |x - b|^2`` in the tangent
    direction of that function, followed by a projection back onto M. Steps
    are capped at half the reach so the walk stays inside the tube.

    Returns:
        ``(x, ok)``; ``ok`` is False where the walk stalled or did not converge.
    """
    tol = get_settings().bisection_tol
    x = np.array(starts, dtype=np.float64)
    diff = b - a
    offset = np.einsum("ij,ij->i", a, a) - np.einsum("ij,ij->i", b, b)
    cap = 0.5 * manifold.reach
    ok = np.ones(x.shape[0], dtype=bool)
    for _ in range(steps):
        g = 2.0 * np.einsum("ij,ij->i", x, diff) + offset
        da = np.linalg.norm(x - a, axis=1)
        db = np.linalg.norm(x - b, axis=1)
        gap = np.abs(da - db)
        active = ok & (gap > tol)
        if not np.any(active):
            break
        n = manifold.closest(x[active]).normals
        grad = 2.0 * diff[active]
        t = grad - np.einsum("ij,ij->i", grad, n)[:, np.newaxis] * n
        t2 = np.einsum("ij,ij->i", t, t)
        stalled = t2 <= 1e-24
        step = -(g[active] / np.where(stalled, 1.0, t2))[:, np.newaxis] * t
        length = np.linalg.norm(step, axis=1)
        step *= np.minimum(1.0, cap / np.maximum(length, 1e-300))[:, np.newaxis]
        rows = np.flatnonzero(active)
        ok[rows[stalled]] = False
        moved = rows[~stalled]
        x[moved] = manifold.closest(x[moved] + step[~stalled]).feet
    gap = np.abs(np.linalg.norm(x - a, axis=1) - np.linalg.norm(x - b, axis=1))
    return x, ok & (gap <= tol * 100)


def _confirm_edges(
    points: FloatArray,
    manifold: AnalyticManifold,
    candidates: dict[Simplex, list[FloatArray]],
) -> dict[Simplex, Witness]:
    """Edges whose bisector meets M at a point no other sample point is closer to."""
    if not candidates:
        return {}
    edges, starts = [], []
    for e, pts in candidates.items():
        for p in pts:
            edges.append(e)
            starts.append(p)
    ids = np.asarray(edges, dtype=np.int64)
    x, ok = onto_bisectors(manifold, np.asarray(starts), points[ids[:, 0]], points[ids[:, 1]])
    heights = manifold.closest(x).heights
    tree = cKDTree(points)
    confirmed: dict[Simplex, Witness] = {}
    for i, e in enumerate(edges):
        if e in confirmed or not ok[i]:
            continue
        if _verify(points, tree, e, x[i], float(heights[i])):
            confirmed[e] = Witness(point=x[i], height=float(heights[i]))
    rejected = len(candidates) - len(confirmed)
    if rejected:
        logger.debug("%d near-tie edges have no point of M on their Voronoi face", rejected)
    return confirmed


def restricted_delaunay(
    D: Union[DelaunayComplex, ArrayLike],
    manifold: AnalyticManifold,
    grid: Optional[WitnessGrid] = None,
) -> RestrictedComplex:
    """
    ``Del_M(P)``: the core complex plus lower simplices witnessed on a grid.

    A grid point on M witnesses the cell of its nearest sample point exactly.
    In R^3 a near tie (within half the grid's covering radius) between
    Delaunay-adjacent points that are not already an edge of the core
    complex only nominates that edge: the grid point is walked along M onto
    the bisector of the two points, and the edge is kept when no other sample
    point is closer there. ``pure`` is False when a witnessed simplex is not
    a face of some restricted (d-1)-simplex.

    Raises:
        GenericityViolated: If a Voronoi vertex lies on M within tolerance.
    """
    settings = get_settings()
    if isinstance(D, DelaunayComplex):
        dt: Optional[DelaunayComplex] = D
        points = D.points
    else:
        points = as_points(getattr(D, "points", D))
        try:
            dt = delaunay(points)
        except (TooFewPoints, AllCoplanar):
            dt = None

    if dt is not None:
        core = core_delaunay(dt, manifold)
        delaunay_edges = {tuple(int(v) for v in e) for e in dt.simplices(1)}
    else:
        core = RestrictedComplex(complex=SimplicialComplex(points))
        delaunay_edges = set()

    if grid is None:
        spacing = median_spacing(points)
        grid = manifold.grid_for(spacing, settings.witness_ratio, settings.max_witnesses)

    closed = core.as_set()
    d = points.shape[1]
    witnesses = dict(core.witnesses)
    found: set[Simplex] = set()
    nominated: dict[Simplex, list[FloatArray]] = {}
    for tie, w in _nearest_subsets(points, grid, 0.5 * grid.covering):
        vertex = (tie[0],)
        if vertex not in found:
            found.add(vertex)
            witnesses.setdefault(vertex, Witness(point=grid.points[w]))
        if d == 3:
            for e in closure([tuple(sorted(tie))]):
                if len(e) == 2 and e in delaunay_edges and e not in closed:
                    starts = nominated.setdefault(e, [])
                    if len(starts) < MAX_EDGE_STARTS:
                        starts.append(grid.points[w])
    for e, witness in _confirm_edges(points, manifold, nominated).items():
        found.add(e)
        witnesses[e] = witness
    extras = sorted(found - closed, key=lambda s: (len(s), s))
    simplices = list(closed) + extras
    K = SimplicialComplex.from_simplices(points, simplices, certify=False) if simplices else SimplicialComplex(points)
    pure = not extras and bool(core.facets())
    result = RestrictedComplex(complex=K, witnesses=witnesses, pure=pure, extras=extras)
    if extras:
        logger.warning("Restricted complex is not pure: %d extra simplices, e.g. %s", len(extras), extras[:3])
    logger.info("Restricted Delaunay complex: %d simplices, pure=%s", len(K), pure)
    return result


def degenerate_witnesses(points: ArrayLike, grid: WitnessGrid, tol: Optional[float] = None) -> int:
    """Grid points whose d+1 nearest sample points are equidistant within ``tol``."""
    pts = as_points(points)
    d = pts.shape[1]
    if pts.shape[0] < d + 1:
        return 0
    tol = get_settings().degeneracy_tol if tol is None else tol
    dist, _ = cKDTree(pts).query(grid.points, k=d + 1)
    return int(np.sum(dist[:, -1] - dist[:, 0] <= tol))
