"""
Measured angle conditions of an alpha complex against their right-hand sides.

Conditions:

- c2: max over the support of every i-simplex (0 < i < d) of its angle with
  the tangent spaces stays below pi/2;
- c3: the min over vertices of that angle stays below
  ``arcsin(((R+beta)^2 - (R+delta)^2 - alpha^2) / (2 (R+delta) alpha))``;
- c4: for (d-1)-simplices, the min over the support stays below
  ``pi/2 - 2 arcsin(alpha / (2 (R - delta - alpha)))``;
- c5: for (d-1)-simplices, the max over vertices stays below pi/4 (needed by
  the practical driver only).

Margins are right-hand side minus measured value, so positive means passing.
"""

import logging
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from src.conditions.bounds import (
    SamplingParams,
    apex_of,
    edge_angle_bound,
    interval_I,
    strict_homotopy,
    triangle_angle_bound,
)
from src.config.settings import get_settings
from src.errors import BoundExceedsOne, ImaginaryBeta
from src.manifolds.base import AnalyticManifold
from src.topology.complex import SimplicialComplex
from src.vertical.angles import BatchAngles, batch_angles, max_angle_over_support

logger = logging.getLogger(__name__)

# simplices re-evaluated with golden-section refinement for condition c2
REFINE_WORST = 8


class ConditionMargin(BaseModel):
    """Worst case of one condition over the simplices it quantifies over."""

    name: str
    rhs: Optional[float] = Field(description="Right-hand side in radians; None when undefined")
    measured: Optional[float] = Field(default=None, description="Worst measured angle")
    margin: Optional[float] = None
    passed: bool
    checked: int = 0
    violations: int = 0
    binding: Optional[list[int]] = Field(default=None, description="Simplex attaining the worst value")
    measured_support: Optional[float] = Field(
        default=None, description="c4 only: min over the support instead of the vertices"
    )


class HypothesisGate(BaseModel):
    """Preconditions on (epsilon, delta, alpha) before any angle is measured."""

    strict_homotopy: bool
    interval: Optional[tuple[float, float]] = None
    alpha_in_interval: bool
    alpha_in_range: bool = Field(description="delta <= alpha < 2(R - delta)/3")
    beta: Optional[float] = None
    rhs_well_defined: bool

    @property
    def passed(self) -> bool:
        return self.strict_homotopy and self.alpha_in_interval and self.alpha_in_range and self.rhs_well_defined


class ConditionReport(BaseModel):
    """Per-condition worst margins plus the gate they are conditional on."""

    params: SamplingParams
    gate: HypothesisGate
    c2: ConditionMargin
    c3: ConditionMargin
    c4: ConditionMargin
    c5: ConditionMargin
    bound_violations: int = Field(
        default=0, description="Vertex angles above the closed-form edge/triangle bounds (noiseless input only)"
    )

    @property
    def naive_hypotheses(self) -> bool:
        return self.gate.passed and self.c2.passed and self.c3.passed and self.c4.passed

    @property
    def practical_hypotheses(self) -> bool:
        return self.naive_hypotheses and self.c5.passed


def condition3_rhs(params: SamplingParams, beta: float) -> float:
    R, delta, alpha = params.R, params.delta, params.alpha
    arg = ((R + beta) ** 2 - (R + delta) ** 2 - alpha**2) / (2.0 * (R + delta) * alpha)
    if arg < -1.0:
        raise BoundExceedsOne(-arg, "condition 3 arcsin")
    if arg > 1.0:
        raise BoundExceedsOne(arg, "condition 3 arcsin")
    return math.asin(arg)


def condition4_rhs(params: SamplingParams) -> float:
    R, delta, alpha = params.R, params.delta, params.alpha
    arg = alpha / (2.0 * (R - delta - alpha))
    if not 0.0 <= arg <= 1.0:
        raise BoundExceedsOne(arg, "condition 4 arcsin")
    return math.pi / 2 - 2.0 * math.asin(arg)


def _gate(params: SamplingParams) -> tuple[HypothesisGate, Optional[float], Optional[float]]:
    eps, delta, alpha, R = params.epsilon, params.delta, params.alpha, params.R
    homotopy = strict_homotopy(eps, delta, R)
    interval = interval_I(eps, delta, R) if homotopy else None
    in_interval = interval is not None and interval[0] <= alpha <= interval[1]
    in_range = delta <= alpha < 2.0 * (R - delta) / 3.0

    beta: Optional[float] = None
    rhs3: Optional[float] = None
    rhs4: Optional[float] = None
    try:
        beta = params.resolved_beta()
        rhs3 = condition3_rhs(params, beta)
    except (ImaginaryBeta, BoundExceedsOne) as e:
        logger.warning("Condition 3 right-hand side undefined: %s", e)
    try:
        rhs4 = condition4_rhs(params)
    except BoundExceedsOne as e:
        logger.warning("Condition 4 right-hand side undefined: %s", e)

    gate = HypothesisGate(
        strict_homotopy=homotopy,
        interval=interval,
        alpha_in_interval=in_interval,
        alpha_in_range=in_range,
        beta=beta,
        rhs_well_defined=rhs3 is not None and rhs4 is not None,
    )
    return gate, rhs3, rhs4


def _margin(
    name: str,
    rhs: Optional[float],
    values: np.ndarray,
    simplices: list[tuple[int, ...]],
) -> ConditionMargin:
    checked = int(values.size)
    if rhs is None or checked == 0:
        return ConditionMargin(name=name, rhs=rhs, passed=rhs is not None, checked=checked)
    worst = int(np.argmax(values))
    measured = float(values[worst])
    return ConditionMargin(
        name=name,
        rhs=rhs,
        measured=measured,
        margin=rhs - measured,
        passed=measured < rhs,
        checked=checked,
        violations=int(np.sum(values >= rhs)),
        binding=list(simplices[worst]),
    )


def _refined_support_max(K: SimplicialComplex, angles: BatchAngles, manifold: AnalyticManifold) -> np.ndarray:
    values = angles.support_max.copy()
    for row in np.argsort(-values)[:REFINE_WORST]:
        coords = K.coordinates(angles.simplices[row])
        values[row] = max(values[row], max_angle_over_support(coords, manifold).value)
    return values


def _bound_violations(K: SimplicialComplex, manifold: AnalyticManifold, R: float) -> int:
    """Count vertex angles exceeding the closed-form bounds (edges, and triangles in R^3)."""
    use_lfs = get_settings().use_lfs
    count = 0
    edges = K.simplices(1)
    if edges:
        angles = batch_angles(K.points, edges, manifold, resolution=1)
        for row, (a, b) in enumerate(edges):
            scale = float(manifold.lfs(K.points[[a, b]]).min()) if use_lfs else R
            length = float(np.linalg.norm(K.points[a] - K.points[b]))
            try:
                bound = edge_angle_bound(length, scale)
            except BoundExceedsOne:
                continue
            count += int(angles.at_vertices[row].max() > bound + 1e-9)
    if K.ambient_dim == 3 and K.simplices(2):
        tris = K.simplices(2)
        angles = batch_angles(K.points, tris, manifold, resolution=1)
        for row, tri in enumerate(tris):
            coords = K.coordinates(tri)
            scale = float(manifold.lfs(coords).min()) if use_lfs else R
            try:
                bound = triangle_angle_bound(coords, scale)
            except BoundExceedsOne:
                continue
            count += int(angles.at_vertices[row, apex_of(coords)] > bound + 1e-9)
    return count


def check_alpha_conditions(
    K: SimplicialComplex, manifold: AnalyticManifold, params: SamplingParams
) -> ConditionReport:
    """
    Measure conditions c2 to c5 on ``K`` (typically ``Del(P, alpha)``).

    The gate on (epsilon, delta, alpha) is evaluated and reported but does not
    short-circuit the measurements. c4 gates on the min over vertices, which is
    never below the min over the support; both are reported.
    """
    gate, rhs3, rhs4 = _gate(params)
    d = K.ambient_dim

    lower = [s for k in range(1, d - 1) for s in K.simplices(k)]
    facets = K.simplices(d - 1)
    facet_angles = batch_angles(K.points, facets, manifold)
    lower_angles = batch_angles(K.points, lower, manifold) if lower else None

    c2_values = [_refined_support_max(K, facet_angles, manifold)] if facets else []
    c3_values = [facet_angles.at_vertices.min(axis=1)] if facets else []
    names = list(facet_angles.simplices)
    if lower_angles is not None:
        c2_values.insert(0, _refined_support_max(K, lower_angles, manifold))
        c3_values.insert(0, lower_angles.at_vertices.min(axis=1))
        names = list(lower_angles.simplices) + names
    c2_all = np.concatenate(c2_values) if c2_values else np.zeros(0)
    c3_all = np.concatenate(c3_values) if c3_values else np.zeros(0)

    c2 = _margin("c2", math.pi / 2, c2_all, names)
    c3 = _margin("c3", rhs3, c3_all, names)
    if facets:
        c4 = _margin("c4", rhs4, facet_angles.at_vertices.min(axis=1), facets)
        c4.measured_support = float(facet_angles.support_min.max())
        c5 = _margin("c5", math.pi / 4, facet_angles.at_vertices.max(axis=1), facets)
    else:
        c4 = ConditionMargin(name="c4", rhs=rhs4, passed=rhs4 is not None)
        c5 = ConditionMargin(name="c5", rhs=math.pi / 4, passed=True)

    report = ConditionReport(
        params=params,
        gate=gate,
        c2=c2,
        c3=c3,
        c4=c4,
        c5=c5,
        bound_violations=_bound_violations(K, manifold, params.R) if params.delta == 0 else 0,
    )
    for c in (c2, c3, c4, c5):
        if not c.passed:
            logger.warning("Condition %s fails: measured %s vs rhs %s at %s", c.name, c.measured, c.rhs, c.binding)
    logger.info(
        "Conditions: gate=%s c2=%s c3=%s c4=%s c5=%s",
        gate.passed, c2.passed, c3.passed, c4.passed, c5.passed,
    )
    return report
