"""Compute the core and restricted Delaunay complexes of a sample and certify them."""

import logging
from dataclasses import dataclass
from typing import Optional

from numpy.typing import ArrayLike
from pydantic import BaseModel

from src.config.settings import get_settings
from src.geometry.primitives import as_points
from src.manifolds.base import AnalyticManifold
from src.restricted.delc import (
    RestrictedComplex,
    core_delaunay,
    degenerate_witnesses,
    restricted_delaunay,
)
from src.sampling.sampler import estimate_sampling, median_spacing
from src.topology.certificate import TopologyCertificate, certify_topology, expected_topology
from src.triangulation.delaunay import delaunay

logger = logging.getLogger(__name__)

# eps/R below which surface samples have equal restricted and core complexes
RESTRICTED_EPS_RATIO = 0.225


class RestrictedSummary(BaseModel):
    """Report section for a restricted-complex run."""

    measured_eps_over_R: float
    in_regime: bool
    degenerate_witnesses: int
    core_size: int
    restricted_size: int
    equal: bool
    pure: bool
    extras: list[list[int]]
    unverified_witnesses: int
    certificate: Optional[TopologyCertificate] = None


@dataclass
class RestrictedRun:
    core: RestrictedComplex
    restricted: RestrictedComplex
    summary: RestrictedSummary


def restricted_pipeline(
    points: ArrayLike,
    manifold: AnalyticManifold,
    expected: Optional[str] = None,
) -> RestrictedRun:
    """
    Core and restricted Delaunay complexes of ``points``, their equality and a certificate.

    The sampling regime and transversality are spot-checked and reported;
    neither stops the run.
    """
    settings = get_settings()
    pts = as_points(getattr(points, "points", points))
    dt = delaunay(pts)
    measured_eps, _ = estimate_sampling(pts, manifold)
    grid = manifold.grid_for(median_spacing(pts), settings.witness_ratio, settings.max_witnesses)
    ratio = measured_eps / manifold.reach
    in_regime = ratio <= RESTRICTED_EPS_RATIO
    if not in_regime:
        logger.warning("Measured eps/R = %.4g is above %.3g; equality is not guaranteed", ratio, RESTRICTED_EPS_RATIO)
    degenerate = degenerate_witnesses(pts, grid)
    if degenerate:
        logger.warning("%d witness points are near Voronoi vertices; transversality is doubtful", degenerate)

    core = core_delaunay(dt, manifold)
    restricted = restricted_delaunay(dt, manifold, grid=grid)
    equal = core.as_set() == restricted.as_set()

    expected = expected or expected_topology(manifold)
    certificate = certify_topology(core.complex, expected, manifold) if expected else None
    summary = RestrictedSummary(
        measured_eps_over_R=ratio,
        in_regime=in_regime,
        degenerate_witnesses=degenerate,
        core_size=len(core.complex),
        restricted_size=len(restricted.complex),
        equal=equal,
        pure=restricted.pure,
        extras=[list(s) for s in restricted.extras],
        unverified_witnesses=len(core.unverified),
        certificate=certificate,
    )
    logger.info("Restricted pipeline: core == restricted is %s, pure=%s", equal, restricted.pure)
    return RestrictedRun(core=core, restricted=restricted, summary=summary)
