"""
Feasible (epsilon/R, alpha/R) region for noiseless surface samples in R^3.

The naive region asks

    sqrt(3) a < min{ ((1 + b)^2 - 1 - a^2) / (2a),  cos(2 arcsin a) }

with ``a = alpha/R`` and ``b = beta_of(eps, alpha)``, together with
``eps <= sqrt(6 - 4 sqrt 2)``, ``a <= 1/sqrt 3`` and ``a`` in I(eps, 0). The
practical region adds ``sqrt(3) a < sin(pi/4 - 2 arcsin a)``.
"""

import logging
import math
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from src.conditions.bounds import beta_of, interval_I
from src.errors import ImaginaryBeta

logger = logging.getLogger(__name__)

EPS_CAP = math.sqrt(6.0 - 4.0 * math.sqrt(2.0))
ALPHA_CAP = 1.0 / math.sqrt(3.0)

REGION_COLUMNS = ["eps_over_R", "alpha_over_R", "naive_feasible", "practical_feasible"]


class RegionMode(str, Enum):
    NAIVE = "naive"
    PRACTICAL = "practical"
    BOTH = "both"


def region_margin(eps: float, alpha: float, mode: RegionMode | str = RegionMode.NAIVE) -> float:
    """
    Smallest slack of the conjunction at ``(eps/R, alpha/R)``; feasible iff positive.

    Points where beta or I(eps, 0) is undefined get -1.
    """
    mode = RegionMode(mode)
    if alpha <= 0:
        return -1.0
    lhs = math.sqrt(3.0) * alpha
    if alpha >= 1.0:
        return -1.0
    twice = 2.0 * math.asin(alpha)
    margins = [
        math.cos(twice) - lhs,
        EPS_CAP - eps,
        ALPHA_CAP - alpha,
    ]
    try:
        beta = beta_of(eps, alpha, 1.0)
    except ImaginaryBeta:
        return -1.0
    margins.append(((1.0 + beta) ** 2 - 1.0 - alpha**2) / (2.0 * alpha) - lhs)
    interval = interval_I(eps, 0.0, 1.0)
    if interval is None:
        return -1.0
    margins.extend([alpha - interval[0], interval[1] - alpha])
    if mode is RegionMode.PRACTICAL:
        margins.append(math.sin(math.pi / 4 - twice) - lhs)
    return min(margins)


def is_feasible(eps: float, alpha: float, mode: RegionMode | str = RegionMode.NAIVE) -> bool:
    return region_margin(eps, alpha, mode) > 0


def max_feasible_epsilon(alpha_over_R: float, mode: RegionMode | str = RegionMode.NAIVE) -> Optional[float]:
    """
    Largest eps/R still feasible at ``alpha_over_R``, or ``None`` if none is.

    The margin only shrinks as eps grows, so a scan brackets the crossing and
    ``brentq`` pins it down.
    """
    mode = RegionMode(mode)

    def margin(e: float) -> float:
        return region_margin(e, alpha_over_R, mode)

    if margin(0.0) <= 0:
        return None
    scan = np.linspace(0.0, EPS_CAP, 513)
    values = np.array([margin(float(e)) for e in scan])
    bad = np.flatnonzero(values <= 0)
    if bad.size == 0:
        return EPS_CAP
    hi = float(scan[bad[0]])
    lo = float(scan[bad[0] - 1])
    return float(brentq(margin, lo, hi, xtol=1e-12))


def feasible_alpha_range(eps_over_R: float, mode: RegionMode | str = RegionMode.NAIVE) -> Optional[tuple[float, float]]:
    """The alpha/R interval feasible at ``eps_over_R``, or ``None``."""
    mode = RegionMode(mode)

    def margin(a: float) -> float:
        return region_margin(eps_over_R, a, mode)

    scan = np.linspace(1e-6, ALPHA_CAP, 1025)
    values = np.array([margin(float(a)) for a in scan])
    good = np.flatnonzero(values > 0)
    if good.size == 0:
        return None
    first, last = int(good[0]), int(good[-1])
    lo = float(scan[first]) if first == 0 else float(brentq(margin, scan[first - 1], scan[first], xtol=1e-12))
    if last == len(scan) - 1:
        hi = float(scan[last])
    else:
        hi = float(brentq(margin, scan[last], scan[last + 1], xtol=1e-12))
    return lo, hi


def feasible_region_3d(mode: RegionMode | str = RegionMode.BOTH, grid: int = 200) -> pd.DataFrame:
    """
    Evaluate the region on a ``grid x grid`` lattice of (eps/R, alpha/R) in [0, 0.6]^2.

    Both feasibility columns are always filled; ``mode`` only selects which
    one is logged.
    """
    if grid < 2:
        raise ValueError("grid resolution must be at least 2")
    mode = RegionMode(mode)
    axis = np.linspace(0.0, 0.6, grid)
    rows = []
    for e in axis:
        for a in axis:
            naive = is_feasible(float(e), float(a), RegionMode.NAIVE)
            practical = naive and is_feasible(float(e), float(a), RegionMode.PRACTICAL)
            rows.append((float(e), float(a), naive, practical))
    frame = pd.DataFrame(rows, columns=REGION_COLUMNS)
    if mode in (RegionMode.NAIVE, RegionMode.BOTH):
        logger.info("Naive region: %d of %d grid points feasible", int(frame.naive_feasible.sum()), len(frame))
    if mode in (RegionMode.PRACTICAL, RegionMode.BOTH):
        logger.info(
            "Practical region: %d of %d grid points feasible", int(frame.practical_feasible.sum()), len(frame)
        )
    return frame


def with_points(frame: pd.DataFrame, points: list[tuple[float, float]]) -> pd.DataFrame:
    """Append exact evaluations at named (eps/R, alpha/R) pairs."""
    extra = pd.DataFrame(
        [
            (e, a, is_feasible(e, a, RegionMode.NAIVE), is_feasible(e, a, RegionMode.PRACTICAL))
            for e, a in points
        ],
        columns=REGION_COLUMNS,
    )
    return pd.concat([frame, extra], ignore_index=True)


def write_region_csv(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, columns=REGION_COLUMNS)
    logger.info("Wrote %d region rows to %s", len(frame), path)
    return path
