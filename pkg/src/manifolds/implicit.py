"""
Polynomial level-set surfaces ``{x : f(x) = 0}`` described in YAML.

Example file::

    dimension: 3
    reach: 0.45
    bounds: [[-1.5, -1.5, -1.5], [1.5, 1.5, 1.5]]
    terms:
      - {coeff: 1.0, powers: [2, 0, 0]}
      - {coeff: 1.0, powers: [0, 2, 0]}
      - {coeff: 4.0, powers: [0, 0, 2]}
      - {coeff: -1.0, powers: [0, 0, 0]}

The reach lower bound is supplied by the author of the file; it is not
computed. Normals are normalised gradients, so the normal side is where
``f > 0``.
"""

import logging
import math
from pathlib import Path
from typing import Optional

import numpy as np
import yaml
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy.spatial import cKDTree

from src.config.settings import get_settings
from src.errors import NearMedialAxis, SurfaceParseError
from src.geometry.primitives import FloatArray
from src.manifolds.base import AnalyticManifold, Projection, WitnessGrid

logger = logging.getLogger(__name__)


class PolynomialTerm(BaseModel):
    coeff: float
    powers: list[int] = Field(..., min_length=2, max_length=3)


class ImplicitSurfaceFile(BaseModel):
    """Validated contents of an implicit surface description."""

    model_config = ConfigDict(extra="forbid")

    dimension: int = Field(..., ge=2, le=3)
    reach: Optional[float] = Field(default=None, gt=0.0)
    bounds: list[list[float]]
    terms: list[PolynomialTerm] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _consistent(self) -> "ImplicitSurfaceFile":
        if len(self.bounds) != 2 or any(len(b) != self.dimension for b in self.bounds):
            raise ValueError("bounds must be [[lo...], [hi...]] with one entry per axis")
        for term in self.terms:
            if len(term.powers) != self.dimension or any(p < 0 for p in term.powers):
                raise ValueError("each term needs one nonnegative power per axis")
        return self


class ImplicitManifold(AnalyticManifold):
    """Zero set of a polynomial, projected by damped Newton iterations."""

    kind = "implicit"

    def __init__(
        self,
        coeffs: ArrayLike,
        powers: ArrayLike,
        reach: float,
        bounds: tuple[ArrayLike, ArrayLike],
        source: str = "<inline>",
    ):
        self.coeffs = np.asarray(coeffs, dtype=np.float64)
        self.powers = np.asarray(powers, dtype=np.int64)
        super().__init__(ambient_dim=self.powers.shape[1], reach=reach)
        self.lo = np.asarray(bounds[0], dtype=np.float64)
        self.hi = np.asarray(bounds[1], dtype=np.float64)
        self.source = source
        self._measure: Optional[float] = None

    @classmethod
    def from_file(cls, path: str | Path, reach: Optional[float] = None) -> "ImplicitManifold":
        """Load a YAML description; ``reach`` overrides the file's value."""
        path = Path(path)
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8"))
            spec = ImplicitSurfaceFile.model_validate(raw)
        except OSError as e:
            raise SurfaceParseError(f"cannot read implicit surface {path}: {e}")
        except (yaml.YAMLError, ValidationError) as e:
            raise SurfaceParseError(f"invalid implicit surface {path}: {e}")
        reach = reach if reach is not None else spec.reach
        if reach is None:
            raise SurfaceParseError(f"{path}: a reach lower bound R is required")
        return cls(
            coeffs=[t.coeff for t in spec.terms],
            powers=[t.powers for t in spec.terms],
            reach=reach,
            bounds=(spec.bounds[0], spec.bounds[1]),
            source=str(path),
        )

    # ------------------------------------------------------------------
    # Polynomial evaluation
    # ------------------------------------------------------------------

    def value(self, pts: FloatArray) -> FloatArray:
        mono = np.prod(pts[:, np.newaxis, :] ** self.powers[np.newaxis, :, :], axis=2)
        return mono @ self.coeffs

    def gradient(self, pts: FloatArray) -> FloatArray:
        grad = np.zeros_like(pts)
        for axis in range(self.ambient_dim):
            dpow = self.powers.copy()
            factor = dpow[:, axis].astype(np.float64)
            dpow[:, axis] = np.maximum(dpow[:, axis] - 1, 0)
            mono = np.prod(pts[:, np.newaxis, :] ** dpow[np.newaxis, :, :], axis=2)
            grad[:, axis] = mono @ (self.coeffs * factor)
        return grad

    def level(self, points: ArrayLike) -> FloatArray:
        return self.value(np.atleast_2d(np.asarray(points, dtype=np.float64)))

    # ------------------------------------------------------------------
    # Projection
    # ------------------------------------------------------------------

    def _foot(self, x: FloatArray) -> FloatArray:
        """
        Nearest point by alternating a Newton step onto the surface with a
        tangential correction towards ``x``. Step lengths are capped at half
        the reach.
        """
        settings = get_settings()
        tol = settings.newton_tol
        cap = 0.5 * self.reach
        m = x.copy()
        for _ in range(settings.newton_max_steps):
            g = self.gradient(m[np.newaxis, :])[0]
            gn2 = float(g @ g)
            if gn2 == 0.0:
                break
            step = -float(self.value(m[np.newaxis, :])[0]) * g / gn2
            norm = float(np.linalg.norm(step))
            if norm > cap:
                step *= cap / norm
            m = m + step
            g = self.gradient(m[np.newaxis, :])[0]
            n = g / np.linalg.norm(g)
            diff = x - m
            tangential = diff - float(diff @ n) * n
            m = m + tangential
            residual = abs(float(self.value(m[np.newaxis, :])[0])) / float(np.linalg.norm(g))
            if residual < tol and float(np.linalg.norm(tangential)) < max(tol, 1e-9 * self.reach):
                return m
        raise NearMedialAxis(
            float("nan"), self.reach,
            message=f"implicit projection did not converge in {settings.newton_max_steps} steps",
        )

    def closest(self, points: ArrayLike) -> Projection:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        feet = np.array([self._foot(x) for x in pts]).reshape(pts.shape)
        g = self.gradient(feet)
        normals = g / np.linalg.norm(g, axis=1)[:, np.newaxis]
        heights = np.einsum("ij,ij->i", pts - feet, normals)
        return Projection(feet=feet, normals=normals, heights=heights)

    # ------------------------------------------------------------------
    # Sampling hooks
    # ------------------------------------------------------------------

    def _near_surface(self, candidates: FloatArray, band: float) -> FloatArray:
        g = self.gradient(candidates)
        gn = np.linalg.norm(g, axis=1)
        est = np.abs(self.value(candidates)) / np.maximum(gn, 1e-300)
        return candidates[(est < band) & (gn > 0)]

    def witness_grid(self, spacing: float) -> WitnessGrid:
        """
        Lattice points near the surface, projected onto it, then thinned.

        The covering radius of a projected lattice is estimated, not proven:
        it is reported as the lattice diagonal.
        """
        step = spacing / math.sqrt(self.ambient_dim)
        axes = [np.arange(lo, hi + step, step) for lo, hi in zip(self.lo, self.hi)]
        lattice = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.ambient_dim)
        near = self._near_surface(lattice, spacing)
        proj = self.closest(near)
        tree = cKDTree(proj.feet)
        keep = np.ones(proj.feet.shape[0], dtype=bool)
        for i, j in sorted(tree.query_pairs(0.25 * step)):
            if keep[i]:
                keep[j] = False
        logger.debug("Implicit witness grid: %d lattice hits, %d kept", near.shape[0], int(keep.sum()))
        return WitnessGrid(points=proj.feet[keep], normals=proj.normals[keep], covering=spacing)

    def random_points(self, rng: np.random.Generator, n: int) -> FloatArray:
        band = 0.25 * self.reach
        out: list[FloatArray] = []
        have = 0
        attempts = 0
        while have < n:
            cand = rng.uniform(self.lo, self.hi, (8 * n, self.ambient_dim))
            near = self._near_surface(cand, band)
            if near.shape[0]:
                feet = self.closest(near).feet
                out.append(feet)
                have += feet.shape[0]
            attempts += 1
            if attempts > 1000:
                raise NearMedialAxis(float("nan"), self.reach, message="no surface found inside bounds")
        return np.vstack(out)[:n]

    def measure(self) -> float:
        if self._measure is None:
            # area from a coarse witness grid: each grid point stands for one covering cell
            h = float(np.min(self.hi - self.lo)) / 40.0
            grid = self.witness_grid(h)
            self._measure = len(grid) * h ** (self.ambient_dim - 1)
        return self._measure

    def bounding_box(self) -> tuple[FloatArray, FloatArray]:
        return self.lo.copy(), self.hi.copy()

    def describe(self) -> str:
        return f"implicit file={self.source} R={self.reach:g}"
