"""
Closed-form sampling conditions and angle bounds.

All functions take absolute lengths in one unit; callers that think in ratios
of the reach pass ``R=1``.
"""

import logging
import math
from functools import lru_cache
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, Field, model_validator
from scipy.optimize import brentq

from src.errors import BoundExceedsOne, ImaginaryBeta
from src.geometry.primitives import as_points, circumsphere

logger = logging.getLogger(__name__)

STRICT_HOMOTOPY_CONSTANT = 4.0 * math.sqrt(2.0) - 5.0


class SamplingParams(BaseModel):
    """Sampling density, noise, offset radius, inner offset and reach bound."""

    epsilon: float = Field(..., ge=0.0)
    delta: float = Field(default=0.0, ge=0.0)
    alpha: float = Field(..., ge=0.0)
    beta: Optional[float] = Field(default=None, description="Defaults to beta_of(epsilon, alpha, R)")
    R: float = Field(..., gt=0.0, description="Lower bound on the reach")

    @model_validator(mode="after")
    def _beta_not_too_large(self) -> "SamplingParams":
        if self.beta is not None and self.beta > self.delta + self.alpha:
            raise ValueError("beta cannot exceed delta + alpha")
        return self

    def resolved_beta(self) -> float:
        """``beta``, or the largest beta the sampling guarantees when unset."""
        if self.beta is not None:
            return self.beta
        return beta_of(self.epsilon, self.alpha, self.R)


def _asin(value: float, what: str) -> float:
    if value > 1.0:
        raise BoundExceedsOne(value, what)
    return math.asin(value)


# ----------------------------------------------------------------------
# Offset homotopy conditions
# ----------------------------------------------------------------------


def strict_homotopy_branches(epsilon: float, delta: float, R: float) -> dict[str, Optional[bool]]:
    """
    Both forms of the strict homotopy condition where they apply.

    The ``delta_le_eps`` form applies when delta <= epsilon and the
    ``delta_ge_eps`` form when delta >= epsilon; at delta == epsilon both are set.
    """
    out: dict[str, Optional[bool]] = {"delta_le_eps": None, "delta_ge_eps": None}
    if delta <= epsilon:
        out["delta_le_eps"] = (R - delta) ** 2 - epsilon**2 > STRICT_HOMOTOPY_CONSTANT * R**2
    if delta >= epsilon:
        out["delta_ge_eps"] = epsilon + math.sqrt(2.0) * delta < (math.sqrt(2.0) - 1.0) * R
    return out


def strict_homotopy(epsilon: float, delta: float, R: float) -> bool:
    """Strict homotopy condition; at delta == epsilon the delta <= epsilon form decides."""
    if R <= 0:
        raise ValueError("R must be positive")
    branches = strict_homotopy_branches(epsilon, delta, R)
    if branches["delta_le_eps"] is not None:
        return bool(branches["delta_le_eps"])
    return bool(branches["delta_ge_eps"])


def interval_I(epsilon: float, delta: float, R: float) -> Optional[tuple[float, float]]:
    """
    Offset radii for which ``P (+) alpha`` retracts onto M along the projection.

    Returns:
        ``(alpha_min, alpha_max)``, or ``None`` when the strict homotopy
        condition fails or the interval is empty.
    """
    if not strict_homotopy(epsilon, delta, R):
        return None
    if delta >= epsilon:
        disc0 = 2.0 * (R - delta) ** 2 - (R + epsilon) ** 2
        if disc0 < 0:
            return None
        root = math.sqrt(disc0)
        return 0.5 * (R + epsilon - root), 0.5 * (R + epsilon + root)

    gap = epsilon**2 - (R - delta) ** 2
    disc1 = gap**2 / R**2 - 10.0 * gap - 7.0 * R**2
    if disc1 < 0:
        return None
    root = math.sqrt(disc1)
    lead = ((R - delta) ** 2 + R**2 - epsilon**2) / R
    beta_min = 0.25 * (lead - root)
    beta_max = 0.25 * (lead + root)
    lo2 = (1.0 + beta_min / R) * epsilon**2 + beta_min**2 + (beta_min / R) * (R**2 - (R - delta) ** 2)
    hi2 = (R - delta) ** 2 - (R - beta_max) ** 2
    if lo2 < 0 or hi2 < 0:
        return None
    lo, hi = math.sqrt(lo2), math.sqrt(hi2)
    if lo > hi:
        return None
    return lo, hi


def beta_of(epsilon: float, alpha: float, R: float) -> float:
    """
    Inner offset radius guaranteed by an epsilon-sample: M (+) beta lies in P (+) alpha.

    Raises:
        ImaginaryBeta: If alpha is too small for epsilon.
    """
    radicand = alpha**2 + epsilon**4 / (4.0 * R**2) - epsilon**2
    if radicand < 0:
        raise ImaginaryBeta(radicand)
    return -(epsilon**2) / (2.0 * R) + math.sqrt(radicand)


# ----------------------------------------------------------------------
# Angle bounds
# ----------------------------------------------------------------------


def edge_angle_bound(length: float, R: float) -> float:
    """Bound on the angle between an edge with endpoints on M and M's tangent space at them."""
    if length <= 0 or R <= 0:
        raise ValueError("edge length and reach must be positive")
    return _asin(length / (2.0 * R), "edge bound")


def is_obtuse(triangle: ArrayLike) -> bool:
    """Whether the angle opposite the longest edge exceeds pi/2."""
    pts = as_points(triangle)
    sq = [float(np.sum((pts[(i + 1) % 3] - pts[(i + 2) % 3]) ** 2)) for i in range(3)]
    longest = max(sq)
    return longest > sum(sq) - longest


def apex_of(triangle: ArrayLike) -> int:
    """Index of the vertex opposite the longest edge."""
    pts = as_points(triangle)
    sq = [float(np.sum((pts[(i + 1) % 3] - pts[(i + 2) % 3]) ** 2)) for i in range(3)]
    return int(np.argmax(sq))


def triangle_angle_bound(triangle: ArrayLike, R: float) -> float:
    """
    Bound on the angle between a triangle on M and the tangent space at the
    vertex opposite its longest edge.

    ``sin <= rho/R`` for obtuse triangles (tight on spheres) and
    ``sin <= sqrt(3) rho/R`` for acute ones.

    Raises:
        BoundExceedsOne: If the triangle is too large for ``R``.
    """
    if R <= 0:
        raise ValueError("reach must be positive")
    rho = circumsphere(triangle).radius
    factor = 1.0 if is_obtuse(triangle) else math.sqrt(3.0)
    return _asin(factor * rho / R, "triangle bound")


def angular_deviation_spread_bound(rho: float, R: float) -> float:
    """Bound on max minus min of a simplex's angle with the tangent spaces at its vertices."""
    if rho < 0 or R <= 0:
        raise ValueError("circumradius must be nonnegative and reach positive")
    return 2.0 * _asin(rho / R, "spread bound")


# ----------------------------------------------------------------------
# Purity
# ----------------------------------------------------------------------


def _purity_margin(ratio: float) -> float:
    return math.pi / 2 - 2.0 * math.asin(ratio / 2.0) - math.asin(ratio)


def purity_threshold_check(epsilon: float, R: float) -> bool:
    """Whether ``2 arcsin(eps/2R) + arcsin(eps/R) < pi/2``."""
    if epsilon >= R:
        return False
    return _purity_margin(epsilon / R) > 0


@lru_cache()
def purity_threshold() -> float:
    """Largest eps/R passing ``purity_threshold_check``, found by root-finding."""
    return float(brentq(_purity_margin, 0.0, 1.0, xtol=1e-14))
