"""
Spheres, flats and the metric primitives built on them.

Points are ``numpy`` float arrays of shape ``(d,)``; batches are ``(n, d)``.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.config.settings import get_settings
from src.errors import DegenerateSimplex, ZeroDimFlat

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


def as_points(points: ArrayLike) -> FloatArray:
    """Coerce input to a finite ``(n, d)`` float array."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError(f"expected an (n, d) array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


@dataclass(frozen=True)
class Sphere:
    """A closed ball boundary: ``center`` and nonnegative ``radius``."""

    center: FloatArray
    radius: float

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError("sphere radius must be nonnegative")

    @property
    def radius2(self) -> float:
        return self.radius * self.radius

    def contains(self, point: ArrayLike, tol: float = 0.0) -> bool:
        """True when ``point`` is in the closed ball grown by ``tol``."""
        diff = np.asarray(point, dtype=np.float64) - self.center
        return float(diff @ diff) <= (self.radius + tol) ** 2


@dataclass(frozen=True)
class Flat:
    """
    An affine flat ``base + span(basis)``.

    ``basis`` holds orthonormal rows; a 0-flat has an empty ``(0, d)`` basis.
    """

    base: FloatArray
    basis: FloatArray

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def ambient_dim(self) -> int:
        return int(self.base.shape[0])

    @classmethod
    def spanned_by(cls, points: ArrayLike, tol: Optional[float] = None) -> "Flat":
        """Affine hull of the given points, with rank decided by ``tol``."""
        pts = as_points(points)
        tol = get_settings().degeneracy_tol if tol is None else tol
        base = pts[0]
        edges = pts[1:] - base
        if edges.shape[0] == 0:
            return cls(base=base, basis=np.zeros((0, pts.shape[1])))
        _, s, vt = np.linalg.svd(edges, full_matrices=False)
        scale = max(float(s[0]), 1.0) if s.size else 1.0
        rank = int(np.sum(s > tol * scale))
        return cls(base=base, basis=vt[:rank])

    @classmethod
    def hyperplane(cls, base: ArrayLike, normal: ArrayLike) -> "Flat":
        """Hyperplane through ``base`` orthogonal to ``normal``."""
        n = np.asarray(normal, dtype=np.float64)
        n = n / np.linalg.norm(n)
        # rows 1.. of V^T span the orthogonal complement of n
        _, _, vt = np.linalg.svd(n[np.newaxis, :])
        return cls(base=np.asarray(base, dtype=np.float64), basis=vt[1:])

    def project(self, point: ArrayLike) -> FloatArray:
        """Orthogonal projection of ``point`` onto the flat."""
        diff = np.asarray(point, dtype=np.float64) - self.base
        return self.base + self.basis.T @ (self.basis @ diff)

    def contains(self, point: ArrayLike, tol: float = 1e-9) -> bool:
        p = np.asarray(point, dtype=np.float64)
        return bool(np.linalg.norm(p - self.project(p)) <= tol)


# ---------------------------------------------------------------------------
# Circumspheres
# ---------------------------------------------------------------------------


def circumsphere(simplex_points: ArrayLike) -> Sphere:
    """
    Smallest sphere passing through every vertex of a simplex.

    For a d-simplex this is the unique circumsphere; for a k-simplex with
    k < d the center lies in the affine hull of the vertices.

    Raises:
        DegenerateSimplex: If the points are affinely dependent.
    """
    pts = as_points(simplex_points)
    if pts.shape[0] == 1:
        return Sphere(center=pts[0].copy(), radius=0.0)
    base = pts[0]
    edges = pts[1:] - base
    gram = edges @ edges.T
    s = np.linalg.svd(edges, compute_uv=False)
    tol = get_settings().degeneracy_tol
    if s[-1] <= tol * max(float(s[0]), 1.0) or edges.shape[0] > pts.shape[1]:
        raise DegenerateSimplex(f"{pts.shape[0]} points are affinely dependent")
    rhs = 0.5 * np.einsum("ij,ij->i", edges, edges)
    lam = np.linalg.solve(gram, rhs)
    offset = edges.T @ lam
    return Sphere(center=base + offset, radius=float(np.linalg.norm(offset)))


def circumspheres(points: FloatArray, simplices: NDArray[np.int_]) -> tuple[FloatArray, FloatArray]:
    """
    Batched ``circumsphere`` for many simplices of equal dimension.

    Returns:
        (centers, squared radii) with shapes ``(m, d)`` and ``(m,)``. Degenerate
        simplices get ``nan`` entries instead of raising.
    """
    simplices = np.asarray(simplices, dtype=np.int64)
    m, k1 = simplices.shape
    d = points.shape[1]
    if k1 == 1:
        return points[simplices[:, 0]].copy(), np.zeros(m)
    base = points[simplices[:, 0]]
    edges = points[simplices[:, 1:]] - base[:, np.newaxis, :]
    gram = np.einsum("mid,mjd->mij", edges, edges)
    rhs = 0.5 * np.einsum("mid,mid->mi", edges, edges)
    centers = np.full((m, d), np.nan)
    radii2 = np.full(m, np.nan)
    dets = np.linalg.det(gram)
    scale = np.max(np.abs(gram).reshape(m, -1), axis=1) ** (k1 - 1)
    ok = np.abs(dets) > 1e-24 * np.maximum(scale, 1e-300)
    if np.any(ok):
        lam = np.linalg.solve(gram[ok], rhs[ok][..., np.newaxis])[..., 0]
        offset = np.einsum("mi,mid->md", lam, edges[ok])
        centers[ok] = base[ok] + offset
        radii2[ok] = np.einsum("md,md->m", offset, offset)
    return centers, radii2


# ---------------------------------------------------------------------------
# Minimum enclosing sphere (Welzl)
# ---------------------------------------------------------------------------


def _support_sphere(support: list[FloatArray]) -> Optional[Sphere]:
    if not support:
        return None
    try:
        return circumsphere(np.array(support))
    except DegenerateSimplex:
        logger.debug("Dependent support of %d points, trying sub-supports", len(support))
        # dependent support: the widest proper sub-support encloses the rest
        best: Optional[Sphere] = None
        for skip in range(len(support)):
            cand = _support_sphere(support[:skip] + support[skip + 1:])
            if cand is not None and (best is None or cand.radius > best.radius):
                best = cand
        return best


def min_enclosing_sphere(points: ArrayLike, tol: float = 1e-12) -> Sphere:
    """
    Smallest ball containing all points (Welzl's randomized incremental form).

    The recursion only descends while adding support points, so its depth is
    at most d+1. The shuffle is seeded, which makes the result bit-stable.
    """
    arr = as_points(points)
    d = arr.shape[1]
    order = np.random.default_rng(0).permutation(arr.shape[0])
    pts = [arr[i] for i in order]

    def grow(prefix: list[FloatArray], support: list[FloatArray]) -> Optional[Sphere]:
        sphere = _support_sphere(support)
        if len(support) == d + 1:
            return sphere
        for i, p in enumerate(prefix):
            if sphere is None or not sphere.contains(p, tol=tol * max(1.0, sphere.radius)):
                sphere = grow(prefix[:i], support + [p])
        return sphere

    result = grow(pts, [])
    assert result is not None
    return result


# ---------------------------------------------------------------------------
# Angles between flats
# ---------------------------------------------------------------------------


def angle_between_flats(u: Flat, v: Flat) -> float:
    """
    Asymmetric angle ``max_{u in U} min_{v in V} angle(u, v)`` in ``[0, pi/2]``.

    Computed from the singular values of ``V_basis @ U_basis.T``: they are the
    cosines of the principal angles. When ``dim U > dim V`` some direction of
    U is orthogonal to V and the angle is exactly pi/2.

    Raises:
        ZeroDimFlat: If U is a point.
    """
    if u.dim == 0:
        raise ZeroDimFlat("angle from a 0-dimensional flat is undefined")
    if v.dim < u.dim:
        return math.pi / 2
    s = np.linalg.svd(v.basis @ u.basis.T, compute_uv=False)
    cos_min = float(np.clip(s.min(), 0.0, 1.0)) if s.size else 0.0
    if cos_min == 0.0:
        return math.pi / 2
    # arcsin of the residual is accurate near 0, arccos near pi/2
    residual = math.sqrt(max(0.0, 1.0 - cos_min * cos_min))
    return math.asin(residual) if cos_min > 0.7 else math.acos(cos_min)


def angle_to_hyperplane(directions: FloatArray, normals: FloatArray) -> FloatArray:
    """
    Angle between ``span(directions)`` and hyperplanes with the given unit normals.

    For a hyperplane V with normal n, ``angle(U, V) = arcsin(|P_U n|)`` where
    ``P_U`` is the orthogonal projection onto U; this is the vectorised form
    of ``angle_between_flats`` against tangent hyperplanes.

    Args:
        directions: ``(k, d)`` orthonormal basis of U
        normals: ``(m, d)`` unit normals

    Returns:
        ``(m,)`` angles in radians.
    """
    proj = normals @ directions.T
    sines = np.sqrt(np.einsum("mk,mk->m", proj, proj))
    return np.arcsin(np.clip(sines, 0.0, 1.0))


def simplex_directions(simplex_points: ArrayLike) -> FloatArray:
    """Orthonormal basis of the linear space parallel to ``Aff(simplex)``."""
    return Flat.spanned_by(simplex_points).basis


def barycentric_grid(k: int, resolution: int) -> FloatArray:
    """All barycentric weights ``i / resolution`` on a k-simplex (k+1 coordinates)."""
    out: list[list[float]] = []

    def rec(prefix: list[int], remaining: int, slots: int) -> None:
        if slots == 1:
            out.append([c / resolution for c in prefix + [remaining]])
            return
        for c in range(remaining + 1):
            rec(prefix + [c], remaining - c, slots - 1)

    rec([], resolution, k + 1)
    return np.array(out, dtype=np.float64)


def facet_normal(facet_points: ArrayLike, opposite: ArrayLike) -> FloatArray:
    """Unit normal of a facet's hyperplane pointing away from ``opposite``."""
    pts = as_points(facet_points)
    d = pts.shape[1]
    if d == 2:
        e = pts[1] - pts[0]
        n = np.array([-e[1], e[0]])
    elif d == 3:
        n = np.cross(pts[1] - pts[0], pts[2] - pts[0])
    else:
        raise ValueError(f"unsupported ambient dimension {d}")
    norm = float(np.linalg.norm(n))
    if norm <= get_settings().degeneracy_tol * max(1.0, float(np.ptp(pts))):
        raise DegenerateSimplex("facet does not span a hyperplane")
    n = n / norm
    if float(n @ (np.asarray(opposite, dtype=np.float64) - pts[0])) > 0:
        n = -n
    return n
