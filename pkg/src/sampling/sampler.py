"""
Generation and certification of (epsilon, delta)-samples.

A cloud P is an (epsilon, delta)-sample of M when every point of M is within
epsilon of P and every point of P is within delta of M.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Literal, Optional, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field
from scipy.spatial import cKDTree

from src.config.settings import get_settings
from src.errors import DegenerateSimplex, InfeasibleSpec
from src.geometry.primitives import FloatArray, as_points
from src.manifolds.base import AnalyticManifold, WitnessGrid

logger = logging.getLogger(__name__)

DUPLICATE_TOL = 1e-12


class SampleSpec(BaseModel):
    """Request for a sample of ``target_manifold``."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    epsilon: float = Field(..., gt=0.0, description="Density: M within epsilon of P")
    delta: float = Field(default=0.0, ge=0.0, description="Noise: P within delta of M")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Random seed")
    target_manifold: AnalyticManifold


@dataclass
class PointCloud:
    """Finite point set with its provenance."""

    points: FloatArray
    provenance: Union[SampleSpec, Literal["external"]] = "external"
    _tree: Optional[cKDTree] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.points = as_points(self.points)
        pairs = cKDTree(self.points).query_pairs(DUPLICATE_TOL)
        if pairs:
            i, j = min(pairs)
            raise DegenerateSimplex(f"points {i} and {j} coincide (closer than {DUPLICATE_TOL:g})")

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def __iter__(self) -> Iterator[FloatArray]:
        return iter(self.points)

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(self.points)
        return self._tree


class SampleReport(BaseModel):
    """Outcome of ``verify_sample``."""

    eps_ok: bool
    delta_ok: bool
    measured_eps: float = Field(description="Max distance from a witness to P")
    measured_delta: float = Field(description="Max distance from a point of P to M")
    covering_slack: float = Field(description="Covering radius of the witness grid")
    witnesses: int


class _SpatialHash:
    """Uniform-cell hash answering 'is any stored point within r?'."""

    def __init__(self, radius: float):
        self.radius = radius
        self.r2 = radius * radius
        self.cells: dict[tuple[int, ...], list[FloatArray]] = defaultdict(list)

    def _key(self, p: FloatArray) -> tuple[int, ...]:
        return tuple(int(math.floor(c / self.radius)) for c in p)

    def near(self, p: FloatArray) -> bool:
        key = self._key(p)
        offsets = np.indices((3,) * len(key)).reshape(len(key), -1).T - 1
        for off in offsets:
            for q in self.cells.get(tuple(k + int(o) for k, o in zip(key, off)), ()):
                diff = p - q
                if float(diff @ diff) < self.r2:
                    return True
        return False

    def add(self, p: FloatArray) -> None:
        self.cells[self._key(p)].append(p)


def sample_manifold(spec: SampleSpec) -> PointCloud:
    """
    Dart throwing on M followed by witness-driven gap filling, then normal noise.

    Darts closer than ``exclusion_ratio * epsilon`` to an accepted point are
    rejected. Once ``dart_failure_budget`` darts in a row are rejected, every
    witness of a grid with spacing ``witness_ratio * epsilon`` that is still
    farther than the exclusion radius is inserted, so the noiseless cloud
    covers M to within exclusion radius plus grid covering. Finally each point
    moves along its normal by a uniform offset in [-delta, delta].

    Raises:
        InfeasibleSpec: If epsilon is not below the reach, or the expected
            cloud size exceeds ``max_sample_points``.
    """
    settings = get_settings()
    manifold = spec.target_manifold
    eps = spec.epsilon
    if eps >= manifold.reach:
        raise InfeasibleSpec(f"epsilon {eps:g} must be below the reach {manifold.reach:g}")

    radius = settings.exclusion_ratio * eps
    k = manifold.ambient_dim - 1
    expected = manifold.measure() / (0.5 * radius**k)
    if expected > settings.max_sample_points:
        raise InfeasibleSpec(
            f"epsilon {eps:g} needs about {expected:.0f} points, "
            f"over the budget of {settings.max_sample_points}"
        )

    rng = np.random.default_rng(spec.seed)
    accepted: list[FloatArray] = []
    grid = _SpatialHash(radius)
    failures = 0
    batch = max(256, int(expected) // 4)
    while failures < settings.dart_failure_budget:
        for p in manifold.random_points(rng, batch):
            if grid.near(p):
                failures += 1
                if failures >= settings.dart_failure_budget:
                    break
                continue
            failures = 0
            grid.add(p)
            accepted.append(p)
            if len(accepted) > settings.max_sample_points:
                raise InfeasibleSpec("dart throwing exceeded the point budget")
    darts = len(accepted)

    witnesses = manifold.grid_for(eps, settings.witness_ratio, settings.max_witnesses)
    dist, _ = cKDTree(np.array(accepted)).query(witnesses.points)
    for idx in np.flatnonzero(dist > radius):
        w = witnesses.points[idx]
        if not grid.near(w):
            grid.add(w)
            accepted.append(w)
    logger.info(
        "Sampled %s: %d darts + %d gap fills (eps=%.4g, delta=%.4g, seed=%d)",
        manifold.describe(), darts, len(accepted) - darts, eps, spec.delta, spec.seed,
    )

    points = np.array(accepted)
    if spec.delta > 0:
        normals = manifold.closest(points).normals
        offsets = rng.uniform(-spec.delta, spec.delta, points.shape[0])
        points = points + offsets[:, np.newaxis] * normals
    return PointCloud(points=points, provenance=spec)


def measure_covering(
    points: ArrayLike, witnesses: WitnessGrid
) -> tuple[float, FloatArray]:
    """Max and per-witness distance from witness points to the cloud."""
    dist, _ = cKDTree(as_points(points)).query(witnesses.points)
    return float(dist.max()) if dist.size else math.inf, dist


def verify_sample(
    cloud: PointCloud | ArrayLike,
    manifold: AnalyticManifold,
    epsilon: float,
    delta: float,
    witnesses: Optional[WitnessGrid] = None,
) -> SampleReport:
    """
    Measure density and noise of a cloud against M.

    ``eps_ok`` is conservative: the largest witness distance plus the grid's
    covering radius must not exceed epsilon.
    """
    settings = get_settings()
    pts = cloud.points if isinstance(cloud, PointCloud) else as_points(cloud)
    if witnesses is None:
        witnesses = manifold.grid_for(epsilon, settings.witness_ratio, settings.max_witnesses)
    measured_eps, _ = measure_covering(pts, witnesses)
    measured_delta = float(manifold.distance(pts).max())
    report = SampleReport(
        eps_ok=measured_eps + witnesses.covering <= epsilon,
        delta_ok=measured_delta <= delta + 1e-12,
        measured_eps=measured_eps,
        measured_delta=measured_delta,
        covering_slack=witnesses.covering,
        witnesses=len(witnesses),
    )
    logger.info(
        "Sample check: eps %.4g (+%.3g slack) vs %.4g -> %s; delta %.3g vs %.3g -> %s",
        measured_eps, witnesses.covering, epsilon, report.eps_ok,
        measured_delta, delta, report.delta_ok,
    )
    return report


def median_spacing(points: ArrayLike) -> float:
    """Median nearest-neighbour distance of a cloud."""
    pts = as_points(points)
    if pts.shape[0] < 2:
        return 1.0
    dist, _ = cKDTree(pts).query(pts, k=2)
    return float(np.median(dist[:, 1]))


def estimate_sampling(points: ArrayLike, manifold: AnalyticManifold) -> tuple[float, float]:
    """
    Measured (epsilon, delta) of a cloud whose sampling parameters are unknown.

    The witness grid spacing follows the cloud's own median spacing; epsilon
    includes the grid's covering radius.
    """
    settings = get_settings()
    pts = as_points(getattr(points, "points", points))
    grid = manifold.grid_for(median_spacing(pts), settings.witness_ratio, settings.max_witnesses)
    eps, _ = measure_covering(pts, grid)
    return eps + grid.covering, float(manifold.distance(pts).max())
