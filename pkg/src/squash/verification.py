"""
Post-hoc verification of a squash run.

Everything here is read-only: the initial complex, the ball union around the
sample and the final complex are checked against the manifold, and the trace
is checked for Euler constancy and sink/source duality.
"""

import logging
from typing import Optional

from numpy.typing import ArrayLike
from pydantic import BaseModel, Field

from src.conditions.bounds import SamplingParams
from src.conditions.report import ConditionReport, check_alpha_conditions
from src.errors import SquashError
from src.manifolds.base import AnalyticManifold
from src.squash.trace import SquashTrace
from src.topology.certificate import TopologyCertificate, certify_topology, expected_topology
from src.topology.complex import SimplicialComplex
from src.vertical.convexity import VerticalConvexityReport, offset_of, verify_vertical_convexity
from src.vertical.dual_graph import build_dual_graph

logger = logging.getLogger(__name__)

# a normal segment that meets a (d-1)-complex does so in a point
SKIN_TOL = 1e-6


class DualGraphCheck(BaseModel):
    acyclic: bool
    cycle: list[list[int]] = Field(default_factory=list)
    height_violations: int
    nodes: int
    arcs: int


class VerificationReport(BaseModel):
    """Hypotheses of the run and what its output turned out to be."""

    algorithm: str
    conditions: Optional[ConditionReport] = None
    dual_graph: Optional[DualGraphCheck] = None
    initial_convexity: Optional[VerticalConvexityReport] = None
    offset_convexity: Optional[VerticalConvexityReport] = None
    terminal_convexity: Optional[VerticalConvexityReport] = None
    skins_coincide: Optional[bool] = Field(
        default=None, description="No d-simplices left and every normal segment meets |K| in at most a point"
    )
    certificate: Optional[TopologyCertificate] = None
    euler_constant: bool
    trace_bounded: bool = Field(description="Trace is no longer than the initial number of d-simplices")
    duality_holds: Optional[bool] = Field(
        default=None,
        description="Every collapse removed a sink (from above) or a source (from below); None when no step has a role",
    )
    naive_disagreements: int = 0
    warnings: list[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        cert = self.certificate is None or self.certificate.matches
        return cert and self.euler_constant and self.trace_bounded and self.duality_holds is not False


def duality_holds(trace: SquashTrace) -> Optional[bool]:
    """
    Whether every collapse removed a sink from above or a source from below.

    ``None`` when no step carries a dual role, as in a run without a manifold.
    """
    roles = [step for step in trace.steps if step.dual_role is not None]
    if not roles:
        return None
    for step in roles:
        if step.dual_role == "isolated":
            continue
        wanted = "sink" if step.side == "from_above" else "source"
        if step.dual_role != wanted:
            return False
    return True


def _dual_check(K: SimplicialComplex, manifold: AnalyticManifold) -> DualGraphCheck:
    graph = build_dual_graph(K, manifold)
    _, cycle = graph.topological_order()
    return DualGraphCheck(
        acyclic=cycle is None,
        cycle=[list(s) for s in cycle or []],
        height_violations=len(graph.height_violations()),
        nodes=len(graph),
        arcs=len(graph.arc_facets),
    )


def verify_run(
    initial: SimplicialComplex,
    final: SimplicialComplex,
    trace: SquashTrace,
    manifold: Optional[AnalyticManifold] = None,
    points: Optional[ArrayLike] = None,
    params: Optional[SamplingParams] = None,
    expected: Optional[str] = None,
) -> VerificationReport:
    """
    Verify a finished run.

    Without a manifold only the trace is checked. Individual checks that
    cannot be carried out (a vertical facet in the dual graph, a bound whose
    arcsin argument exceeds one) are recorded as warnings.

    Args:
        initial: The alpha-complex the run started from
        final: The simplified complex
        trace: The run's trace
        manifold: Reference manifold for hypotheses and certificate
        points: The sample, for the convexity of its ball union
        params: Sampling parameters for the condition margins
        expected: Topology name; inferred from the manifold when omitted
    """
    d = initial.ambient_dim
    report = VerificationReport(
        algorithm=trace.algorithm,
        euler_constant=trace.euler_constant,
        trace_bounded=len(trace) <= trace.initial_top_simplices,
        duality_holds=duality_holds(trace),
        naive_disagreements=sum(s.naive_agrees is False for s in trace.steps),
    )
    if not report.euler_constant:
        report.warnings.append("euler characteristic changed during the run")
    if manifold is None:
        return report

    if params is not None:
        try:
            report.conditions = check_alpha_conditions(initial, manifold, params)
        except SquashError as e:
            report.warnings.append(f"conditions: {e}")

    try:
        report.dual_graph = _dual_check(initial, manifold)
    except SquashError as e:
        report.warnings.append(f"dual graph: {e}")

    try:
        report.initial_convexity = verify_vertical_convexity(initial, manifold)
        if points is not None and params is not None:
            report.offset_convexity = verify_vertical_convexity(offset_of(points, params.alpha), manifold)
        report.terminal_convexity = verify_vertical_convexity(final, manifold)
    except SquashError as e:
        report.warnings.append(f"convexity: {e}")

    if report.terminal_convexity is not None:
        terminal = report.terminal_convexity
        report.skins_coincide = (
            final.count(d) == 0 and terminal.max_pieces <= 1 and terminal.max_interval_length <= SKIN_TOL
        )

    expected = expected or expected_topology(manifold)
    if expected is not None:
        report.certificate = certify_topology(final, expected, manifold)

    logger.info(
        "Verification of %s run: certificate=%s, euler constant=%s, duality=%s, %d warnings",
        trace.algorithm,
        None if report.certificate is None else report.certificate.matches,
        report.euler_constant,
        report.duality_holds,
        len(report.warnings),
    )
    return report
