"""
Codimension-one manifolds with an exact nearest-point oracle.

Concrete kinds implement ``closest`` (vectorised foot points, unit normals and
signed heights) plus the sampling hooks; the public single-point API adds the
tube checks.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from src.errors import NearMedialAxis, NotOnManifold
from src.geometry.primitives import FloatArray, Flat

logger = logging.getLogger(__name__)

# Stand-in reach for unbounded-reach kinds; ``reach_is_infinite`` flags it.
REACH_SENTINEL = 1e12

ON_MANIFOLD_TOL = 1e-9


@dataclass(frozen=True)
class Projection:
    """Foot points, unit normals at the feet and signed heights for a batch."""

    feet: FloatArray
    normals: FloatArray
    heights: FloatArray

    @property
    def distances(self) -> FloatArray:
        return np.abs(self.heights)


@dataclass(frozen=True)
class WitnessGrid:
    """
    Points on the manifold with a certified covering radius.

    Every point of the manifold lies within ``covering`` of some grid point.
    """

    points: FloatArray
    normals: FloatArray
    covering: float

    def __len__(self) -> int:
        return int(self.points.shape[0])


class AnalyticManifold(ABC):
    """A smooth closed (or planar) hypersurface with outward normals."""

    kind: str = "abstract"

    def __init__(self, ambient_dim: int, reach: float, reach_is_infinite: bool = False):
        if ambient_dim not in (2, 3):
            raise ValueError(f"ambient dimension must be 2 or 3, got {ambient_dim}")
        if not reach > 0:
            raise ValueError("reach lower bound must be positive")
        self.ambient_dim = ambient_dim
        self.reach = float(reach)
        self.reach_is_infinite = reach_is_infinite

    # ------------------------------------------------------------------
    # Kind-specific hooks
    # ------------------------------------------------------------------

    @abstractmethod
    def closest(self, points: ArrayLike) -> Projection:
        """Vectorised nearest points; rows on the medial axis get arbitrary feet."""

    @abstractmethod
    def witness_grid(self, spacing: float) -> WitnessGrid:
        """Grid on the manifold whose covering radius is at most ``spacing``."""

    @abstractmethod
    def random_points(self, rng: np.random.Generator, n: int) -> FloatArray:
        """``n`` random points on the manifold (area-uniform where possible)."""

    @abstractmethod
    def measure(self) -> float:
        """Length or area of the manifold (of its sampled patch if unbounded)."""

    @abstractmethod
    def bounding_box(self) -> tuple[FloatArray, FloatArray]:
        """Axis-aligned bounds of the manifold (of its patch if unbounded)."""

    @abstractmethod
    def describe(self) -> str:
        """Surface description in the ``kind key=value`` text format."""

    def level(self, points: ArrayLike) -> FloatArray:
        """Globally defined function whose sign is the side of the manifold."""
        return self.closest(points).heights

    def lfs(self, points: ArrayLike) -> FloatArray:
        """Local feature size at manifold points; defaults to the reach bound."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.full(pts.shape[0], self.reach)

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------

    def project_many(self, points: ArrayLike, check: bool = True) -> Projection:
        """Batch projection; raises NearMedialAxis if any row is outside the tube."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        proj = self.closest(pts)
        if check and pts.shape[0]:
            worst = int(np.argmax(proj.distances))
            if proj.distances[worst] >= self.reach:
                raise NearMedialAxis(float(proj.distances[worst]), self.reach)
        return proj

    def project(self, x: ArrayLike) -> FloatArray:
        """Nearest point of the manifold to ``x``."""
        return self.project_many(x).feet[0]

    def alt_height(self, x: ArrayLike) -> float:
        """Signed height ``(x - pi(x)) . n(pi(x))``; positive on the normal side."""
        return float(self.project_many(x).heights[0])

    def distance(self, points: ArrayLike) -> FloatArray:
        """Unsigned distance to the manifold for every row."""
        return self.closest(points).distances

    def normal(self, m: ArrayLike) -> FloatArray:
        """Unit normal at a manifold point."""
        proj = self.closest(m)
        if proj.distances[0] > ON_MANIFOLD_TOL:
            raise NotOnManifold(float(proj.distances[0]))
        return proj.normals[0]

    def tangent_flat(self, m: ArrayLike) -> Flat:
        """Affine tangent hyperplane at a manifold point."""
        n = self.normal(m)
        return Flat.hyperplane(np.asarray(m, dtype=np.float64), n)

    def grid_for(self, epsilon: float, ratio: float, max_points: int) -> WitnessGrid:
        """
        Witness grid with spacing ``ratio * epsilon``, coarsened to respect ``max_points``.
        """
        spacing = ratio * epsilon
        estimate = self.measure() / spacing ** (self.ambient_dim - 1)
        if estimate > max_points:
            spacing *= (estimate / max_points) ** (1.0 / (self.ambient_dim - 1))
            logger.warning(
                "Witness grid capped at ~%d points; spacing raised to %.4g (%.1f%% of epsilon)",
                max_points, spacing, 100.0 * spacing / epsilon,
            )
        return self.witness_grid(spacing)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()!r})"


def lattice_count(length: float, spacing: float) -> int:
    """Number of equal steps of at most ``spacing`` needed to cover ``length``."""
    return max(1, int(math.ceil(length / spacing - 1e-12)))
