"""Closed-form manifold kinds: circle, sphere, torus and hyperplane."""

import math

import numpy as np
from numpy.typing import ArrayLike

from src.geometry.primitives import FloatArray, Flat
from src.manifolds.base import (
    REACH_SENTINEL,
    AnalyticManifold,
    Projection,
    WitnessGrid,
    lattice_count,
)


def _fmt_vec(v: FloatArray) -> str:
    return ",".join(f"{float(c):g}" for c in v)


def _unit_rows(v: FloatArray, fallback: FloatArray) -> tuple[FloatArray, FloatArray]:
    norms = np.linalg.norm(v, axis=1)
    safe = norms > 0
    units = np.empty_like(v)
    units[safe] = v[safe] / norms[safe, np.newaxis]
    units[~safe] = fallback
    return units, norms


class RoundManifold(AnalyticManifold):
    """Round (d-1)-sphere of radius ``radius`` around ``center``."""

    def __init__(self, radius: float, center: ArrayLike):
        center = np.asarray(center, dtype=np.float64)
        super().__init__(ambient_dim=center.shape[0], reach=radius)
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.center = center

    def closest(self, points: ArrayLike) -> Projection:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        fallback = np.zeros(self.ambient_dim)
        fallback[0] = 1.0
        units, norms = _unit_rows(pts - self.center, fallback)
        return Projection(
            feet=self.center + self.radius * units,
            normals=units,
            heights=norms - self.radius,
        )

    def lfs(self, points: ArrayLike) -> FloatArray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.full(pts.shape[0], self.radius)

    def random_points(self, rng: np.random.Generator, n: int) -> FloatArray:
        g = rng.standard_normal((n, self.ambient_dim))
        g /= np.linalg.norm(g, axis=1)[:, np.newaxis]
        return self.center + self.radius * g

    def bounding_box(self) -> tuple[FloatArray, FloatArray]:
        return self.center - self.radius, self.center + self.radius


class CircleManifold(RoundManifold):
    """Circle in the plane."""

    kind = "circle"

    def __init__(self, radius: float = 1.0, center: ArrayLike = (0.0, 0.0)):
        super().__init__(radius, center)
        if self.ambient_dim != 2:
            raise ValueError("circle center must have 2 coordinates")

    def measure(self) -> float:
        return 2.0 * math.pi * self.radius

    def witness_grid(self, spacing: float) -> WitnessGrid:
        # the farthest circle point sits half an angular step from a grid point
        n = max(3, lattice_count(math.pi * self.radius, spacing))
        t = 2.0 * math.pi * np.arange(n) / n
        units = np.column_stack([np.cos(t), np.sin(t)])
        covering = 2.0 * self.radius * math.sin(math.pi / (2 * n))
        return WitnessGrid(points=self.center + self.radius * units, normals=units, covering=covering)

    def describe(self) -> str:
        return f"circle r={self.radius:g} c={_fmt_vec(self.center)}"


class SphereManifold(RoundManifold):
    """Round 2-sphere in R^3."""

    kind = "sphere"

    def __init__(self, radius: float = 1.0, center: ArrayLike = (0.0, 0.0, 0.0)):
        super().__init__(radius, center)
        if self.ambient_dim != 3:
            raise ValueError("sphere center must have 3 coordinates")

    def measure(self) -> float:
        return 4.0 * math.pi * self.radius**2

    def witness_grid(self, spacing: float) -> WitnessGrid:
        """
        Latitude rings with per-ring longitude counts.

        Any sphere point reaches its ring along a meridian (at most half a ring
        step) and then a grid point along the ring's parallel (at most half a
        longitude step), so the covering radius is the worst sum of the two arcs.
        """
        r = self.radius
        rings = lattice_count(math.pi * r, spacing)
        dtheta = math.pi / rings
        units = []
        covering = 0.0
        for i in range(rings):
            theta = (i + 0.5) * dtheta
            along = 2.0 * math.pi * r * math.sin(theta)
            count = lattice_count(along, spacing)
            phi = 2.0 * math.pi * (np.arange(count) + 0.5 * (i % 2)) / count
            st = math.sin(theta)
            units.append(
                np.column_stack([st * np.cos(phi), st * np.sin(phi), np.full(count, math.cos(theta))])
            )
            covering = max(covering, 0.5 * r * dtheta + math.pi * r * st / count)
        u = np.vstack(units)
        return WitnessGrid(points=self.center + r * u, normals=u, covering=covering)

    def describe(self) -> str:
        return f"sphere r={self.radius:g} c={_fmt_vec(self.center)}"


class TorusManifold(AnalyticManifold):
    """Torus of revolution around the z-axis with tube radius ``minor``."""

    kind = "torus"

    def __init__(self, major: float = 3.0, minor: float = 1.0):
        if not 0 < minor < major:
            raise ValueError("torus needs 0 < minor < major")
        super().__init__(ambient_dim=3, reach=min(minor, major - minor))
        self.major = float(major)
        self.minor = float(minor)

    def _core_points(self, pts: FloatArray) -> FloatArray:
        planar = pts.copy()
        planar[:, 2] = 0.0
        units, _ = _unit_rows(planar, np.array([1.0, 0.0, 0.0]))
        return self.major * units

    def closest(self, points: ArrayLike) -> Projection:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        core = self._core_points(pts)
        radial = core / self.major
        units, norms = _unit_rows(pts - core, radial)
        # rows exactly on the core circle pick the outward radial direction per row
        on_core = norms == 0
        units[on_core] = radial[on_core]
        return Projection(
            feet=core + self.minor * units,
            normals=units,
            heights=norms - self.minor,
        )

    def lfs(self, points: ArrayLike) -> FloatArray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        axis_dist = np.linalg.norm(pts[:, :2], axis=1)
        return np.minimum(self.minor, axis_dist)

    def measure(self) -> float:
        return 4.0 * math.pi**2 * self.major * self.minor

    def bounding_box(self) -> tuple[FloatArray, FloatArray]:
        outer = self.major + self.minor
        return np.array([-outer, -outer, -self.minor]), np.array([outer, outer, self.minor])

    def _param(self, u: FloatArray, v: FloatArray) -> tuple[FloatArray, FloatArray]:
        ring = self.major + self.minor * np.cos(v)
        pts = np.column_stack([ring * np.cos(u), ring * np.sin(u), self.minor * np.sin(v)])
        normals = np.column_stack([np.cos(v) * np.cos(u), np.cos(v) * np.sin(u), np.sin(v)])
        return pts, normals

    def witness_grid(self, spacing: float) -> WitnessGrid:
        """Tube rings (fixed v) with longitude counts scaled to each ring's radius."""
        rings = lattice_count(math.pi * self.minor, spacing)
        covering = 0.0
        pts, normals = [], []
        for j in range(2 * rings):
            v = math.pi * (j + 0.5) / rings
            ring_radius = self.major + self.minor * math.cos(v)
            count = lattice_count(math.pi * ring_radius, spacing)
            u = 2.0 * math.pi * (np.arange(2 * count) + 0.5 * (j % 2)) / (2 * count)
            p, n = self._param(u, np.full(u.shape[0], v))
            pts.append(p)
            normals.append(n)
            covering = max(
                covering,
                0.5 * math.pi * self.minor / rings + math.pi * ring_radius / (2 * count),
            )
        return WitnessGrid(points=np.vstack(pts), normals=np.vstack(normals), covering=covering)

    def random_points(self, rng: np.random.Generator, n: int) -> FloatArray:
        out: list[FloatArray] = []
        have = 0
        while have < n:
            u = rng.uniform(0.0, 2.0 * math.pi, 2 * n)
            v = rng.uniform(0.0, 2.0 * math.pi, 2 * n)
            keep = rng.uniform(0.0, 1.0, 2 * n) < (self.major + self.minor * np.cos(v)) / (
                self.major + self.minor
            )
            p, _ = self._param(u[keep], v[keep])
            out.append(p)
            have += p.shape[0]
        return np.vstack(out)[:n]

    def describe(self) -> str:
        return f"torus R={self.major:g} r={self.minor:g}"


class HyperplaneManifold(AnalyticManifold):
    """
    Hyperplane through ``base`` with unit normal ``normal``.

    The reach is infinite; sampling and witness grids use the square patch of
    half-width ``half_width`` centred on ``base``.
    """

    kind = "plane"

    def __init__(self, normal: ArrayLike, base: ArrayLike, half_width: float = 1.0):
        n = np.asarray(normal, dtype=np.float64)
        base = np.asarray(base, dtype=np.float64)
        if n.shape != base.shape:
            raise ValueError("plane normal and base must have the same dimension")
        norm = float(np.linalg.norm(n))
        if norm == 0:
            raise ValueError("plane normal must be non-zero")
        super().__init__(ambient_dim=n.shape[0], reach=REACH_SENTINEL, reach_is_infinite=True)
        self.unit_normal = n / norm
        self.base = base
        self.half_width = float(half_width)
        self.flat = Flat.hyperplane(base, self.unit_normal)

    @classmethod
    def through_facet(cls, facet_points: ArrayLike, normal: ArrayLike) -> "HyperplaneManifold":
        """Hyperplane spanned by a facet, oriented by ``normal``."""
        pts = np.atleast_2d(np.asarray(facet_points, dtype=np.float64))
        return cls(normal=normal, base=pts.mean(axis=0))

    def flipped(self) -> "HyperplaneManifold":
        return HyperplaneManifold(-self.unit_normal, self.base, self.half_width)

    def closest(self, points: ArrayLike) -> Projection:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        heights = (pts - self.base) @ self.unit_normal
        return Projection(
            feet=pts - heights[:, np.newaxis] * self.unit_normal,
            normals=np.broadcast_to(self.unit_normal, pts.shape).copy(),
            heights=heights,
        )

    def measure(self) -> float:
        return (2.0 * self.half_width) ** (self.ambient_dim - 1)

    def bounding_box(self) -> tuple[FloatArray, FloatArray]:
        extent = self.half_width * np.abs(self.flat.basis).sum(axis=0)
        return self.base - extent, self.base + extent

    def witness_grid(self, spacing: float) -> WitnessGrid:
        k = self.ambient_dim - 1
        step = 2.0 * spacing / math.sqrt(k)
        count = lattice_count(2.0 * self.half_width, step) + 1
        axis = np.linspace(-self.half_width, self.half_width, count)
        mesh = np.stack(np.meshgrid(*([axis] * k), indexing="ij"), axis=-1).reshape(-1, k)
        pts = self.base + mesh @ self.flat.basis
        actual_step = 2.0 * self.half_width / max(count - 1, 1)
        return WitnessGrid(
            points=pts,
            normals=np.broadcast_to(self.unit_normal, pts.shape).copy(),
            covering=0.5 * actual_step * math.sqrt(k),
        )

    def random_points(self, rng: np.random.Generator, n: int) -> FloatArray:
        k = self.ambient_dim - 1
        coords = rng.uniform(-self.half_width, self.half_width, (n, k))
        return self.base + coords @ self.flat.basis

    def describe(self) -> str:
        return (
            f"plane n={_fmt_vec(self.unit_normal)} p={_fmt_vec(self.base)} w={self.half_width:g}"
        )
