"""
Reconstruction drivers.

Each driver repeatedly collapses a vertically free simplex until none is
left. The naive drivers decide sides relative to the manifold, the practical
ones relative to a hyperplane spanned by a facet of the simplex being
removed, and the non-crossing driver walks the dual graph in order of
circumcenter height.
"""

import logging
from pathlib import Path
from typing import Callable, NamedTuple, Optional

import numpy as np
from numpy.typing import ArrayLike

from src.conditions.bounds import SamplingParams
from src.config.settings import get_settings
from src.errors import GenericityViolated, SquashError, Stuck
from src.geometry.primitives import as_points, circumspheres
from src.manifolds.base import AnalyticManifold
from src.sampling.sampler import estimate_sampling
from src.squash.trace import CollapseStep, SquashTrace, TerminalState
from src.squash.verification import VerificationReport, verify_run
from src.topology.complex import SimplicialComplex
from src.triangulation.alpha import alpha_complex, alpha_values
from src.triangulation.cache import load_alpha_cache, save_alpha_cache
from src.triangulation.delaunay import delaunay
from src.vertical.convexity import verify_vertical_convexity
from src.vertical.dual_graph import DualGraph, build_dual_graph
from src.vertical.free import (
    CollapseScheduler,
    FreeSide,
    VerticalFreeness,
    candidates,
    vertically_free,
)
from src.vertical.sides import SideTable, compute_side_table

logger = logging.getLogger(__name__)

Simplex = tuple[int, ...]
Verifier = Callable[[SimplicialComplex], bool]
SnapshotHook = Callable[[int, SimplicialComplex], None]


class SquashResult(NamedTuple):
    complex: SimplicialComplex
    trace: SquashTrace
    report: VerificationReport


def _role(graph: Optional[DualGraph], sigma: Simplex) -> Optional[str]:
    if graph is None or sigma not in graph.succ:
        return None
    sink, source = not graph.succ[sigma], not graph.pred[sigma]
    if sink and source:
        return "isolated"
    if sink:
        return "sink"
    return "source" if source else "inner"


def _try_dual_graph(K: SimplicialComplex, manifold: Optional[AnalyticManifold]) -> Optional[DualGraph]:
    if manifold is None or K.count(K.ambient_dim) == 0:
        return None
    try:
        return build_dual_graph(K, manifold)
    except SquashError as e:
        logger.warning("Dual graph unavailable, collapse/graph duality is not tracked: %s", e)
        return None


def default_verifier(manifold: AnalyticManifold) -> Verifier:
    """Vertical convexity and covering projection of the intermediate complex."""

    def check(K: SimplicialComplex) -> bool:
        report = verify_vertical_convexity(K, manifold)
        return report.vertically_convex and report.covering_projection

    return check


def _run(
    K: SimplicialComplex,
    scheduler: CollapseScheduler,
    algorithm: str,
    graph: Optional[DualGraph] = None,
    diagnostic: Optional[AnalyticManifold] = None,
    verifier: Optional[Verifier] = None,
    spot_check_every: Optional[int] = None,
    on_snapshot: Optional[SnapshotHook] = None,
    snapshot_every: int = 0,
) -> SquashTrace:
    every = get_settings().spot_check_every if spot_check_every is None else spot_check_every
    d = K.ambient_dim
    trace = SquashTrace(
        algorithm=algorithm,
        initial_top_simplices=K.count(d),
        initial_euler=K.euler_characteristic(),
    )
    while (cand := scheduler.pop()) is not None:
        step = len(trace.steps) + 1
        agrees = None
        if diagnostic is not None:
            try:
                agrees = vertically_free(K, cand.tau, diagnostic) is not None
            except SquashError:
                agrees = False
        role = _role(graph, cand.sigma)

        before = K.euler_characteristic()
        record = K.collapse(cand.tau)
        after = K.euler_characteristic()
        if graph is not None and cand.sigma in graph.succ:
            graph.remove(cand.sigma)
        scheduler.after_collapse(record.sigma)

        spot = None
        if verifier is not None and every and step % every == 0:
            spot = verifier(K)
            if not spot:
                logger.warning("Spot check failed after step %d (%s into %s)", step, cand.tau, cand.sigma)
        trace.steps.append(
            CollapseStep(
                step=step,
                tau=list(cand.tau),
                sigma=list(record.sigma),
                side=cand.side.value,
                removed=len(record.removed),
                euler_before=before,
                euler_after=after,
                dual_role=role,
                naive_agrees=agrees,
                spot_check=spot,
            )
        )
        if before != after:
            logger.error("Euler characteristic changed from %d to %d at step %d", before, after, step)
        if on_snapshot is not None and snapshot_every and step % snapshot_every == 0:
            on_snapshot(step, K)

    trace.terminal = TerminalState.of(K)
    logger.info(
        "%s simplification: %d collapses, %d d-simplices left, chi=%d",
        algorithm, len(trace), trace.terminal.top_simplices_left, trace.terminal.euler_characteristic,
    )
    return trace


def naive_vertical_simplification(
    K: SimplicialComplex,
    manifold: AnalyticManifold,
    verifier: Optional[Verifier] = None,
    spot_check_every: Optional[int] = None,
    on_snapshot: Optional[SnapshotHook] = None,
    snapshot_every: int = 0,
) -> tuple[SimplicialComplex, SquashTrace]:
    """
    Collapse simplices vertically free relative to ``manifold`` until none is left.

    Candidates are taken in (dimension, vertex ids) order. ``K`` itself is not
    modified.

    Args:
        K: Complex whose support lies in the tubular neighbourhood of the manifold
        manifold: Reference manifold for upper and lower facets
        verifier: Called on the intermediate complex every ``spot_check_every`` steps;
            defaults to a vertical convexity check when spot checks are enabled
        spot_check_every: Overrides the configured spot-check period (0 disables)
        on_snapshot: Called with (step, complex) every ``snapshot_every`` steps
        snapshot_every: Snapshot period (0 disables)

    Returns:
        The simplified complex and its trace.
    """
    out = K.copy()
    graph = _try_dual_graph(out, manifold)
    scheduler = CollapseScheduler.for_reference(out, manifold, strict=False)
    if verifier is None:
        verifier = default_verifier(manifold)
    trace = _run(
        out, scheduler, "naive",
        graph=graph,
        verifier=verifier,
        spot_check_every=spot_check_every,
        on_snapshot=on_snapshot,
        snapshot_every=snapshot_every,
    )
    return out, trace


def practical_vertical_simplification(
    K: SimplicialComplex,
    diagnostic_manifold: Optional[AnalyticManifold] = None,
    verifier: Optional[Verifier] = None,
    spot_check_every: Optional[int] = None,
    on_snapshot: Optional[SnapshotHook] = None,
    snapshot_every: int = 0,
) -> tuple[SimplicialComplex, SquashTrace]:
    """
    Collapse simplices vertically free relative to their own reference hyperplane.

    The decisions never consult a manifold. ``diagnostic_manifold``, when
    given, is used to record whether the manifold-relative test would have
    agreed on each step and whether the removed coface was a sink or source of
    the manifold's dual graph.
    """
    out = K.copy()
    graph = _try_dual_graph(out, diagnostic_manifold)
    scheduler = CollapseScheduler.for_reference(out, None, strict=False)
    trace = _run(
        out, scheduler, "practical",
        graph=graph,
        diagnostic=diagnostic_manifold,
        verifier=verifier,
        spot_check_every=spot_check_every,
        on_snapshot=on_snapshot,
        snapshot_every=snapshot_every,
    )
    disagreements = trace.summary().disagreements
    if disagreements:
        logger.warning("Manifold-relative test disagreed on %d of %d steps", disagreements, len(trace))
    return out, trace


def sampling_params(
    points: np.ndarray,
    alpha: float,
    manifold: AnalyticManifold,
    epsilon: Optional[float],
    delta: Optional[float],
) -> Optional[SamplingParams]:
    """Sampling parameters for the condition report; unknown epsilon or delta are measured."""
    if manifold.reach_is_infinite:
        return None
    if epsilon is None or delta is None:
        measured_eps, measured_delta = estimate_sampling(points, manifold)
        epsilon = measured_eps if epsilon is None else epsilon
        delta = measured_delta if delta is None else delta
        logger.info("Using measured sampling parameters eps=%.4g, delta=%.3g", epsilon, delta)
    try:
        return SamplingParams(epsilon=epsilon, delta=delta, alpha=alpha, R=manifold.reach)
    except ValueError as e:
        logger.warning("Sampling parameters rejected: %s", e)
        return None


def _initial_complex(
    points: np.ndarray, alpha: float, cache: Optional[str | Path] = None
) -> SimplicialComplex:
    """``Del(P, alpha)``, going through the alpha-value cache when one is named."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if cache is not None and Path(cache).exists():
        values = load_alpha_cache(cache, points)
    else:
        values = alpha_values(delaunay(points))
        if cache is not None:
            save_alpha_cache(cache, values)
    return alpha_complex(values, alpha)


def naive_squash(
    P: ArrayLike,
    alpha: float,
    manifold: AnalyticManifold,
    epsilon: Optional[float] = None,
    delta: Optional[float] = None,
    cache: Optional[str | Path] = None,
    **loop_options,
) -> SquashResult:
    """
    Build ``Del(P, alpha)`` and simplify it relative to ``manifold``.

    ``epsilon`` and ``delta`` feed the condition margins; unknown values are
    measured from the sample. Extra keyword arguments go to
    ``naive_vertical_simplification``.

    Raises:
        TooFewPoints: If P has fewer than d+1 points.
        AllCoplanar: If P lies in a hyperplane.
    """
    pts = as_points(getattr(P, "points", P))
    initial = _initial_complex(pts, alpha, cache)
    K, trace = naive_vertical_simplification(initial, manifold, **loop_options)
    params = sampling_params(pts, alpha, manifold, epsilon, delta)
    report = verify_run(initial, K, trace, manifold, points=pts, params=params)
    return SquashResult(K, trace, report)


def practical_squash(
    P: ArrayLike,
    alpha: float,
    manifold: Optional[AnalyticManifold] = None,
    epsilon: Optional[float] = None,
    delta: Optional[float] = None,
    cache: Optional[str | Path] = None,
    **loop_options,
) -> SquashResult:
    """
    Build ``Del(P, alpha)`` and simplify it without consulting a manifold.

    ``manifold`` is only used to verify the outcome and to record how the
    manifold-relative test would have decided.
    """
    pts = as_points(getattr(P, "points", P))
    initial = _initial_complex(pts, alpha, cache)
    K, trace = practical_vertical_simplification(initial, manifold, **loop_options)
    params = sampling_params(pts, alpha, manifold, epsilon, delta) if manifold is not None else None
    report = verify_run(initial, K, trace, manifold, points=pts, params=params)
    return SquashResult(K, trace, report)


def _center_heights(
    K: SimplicialComplex, tops: list[Simplex], manifold: AnalyticManifold
) -> dict[Simplex, float]:
    if not tops:
        return {}
    centers, _ = circumspheres(K.points, np.asarray(tops, dtype=np.int64))
    heights = manifold.closest(centers).heights
    tol = get_settings().genericity_tol
    close = np.flatnonzero(np.abs(heights) <= tol)
    if close.size:
        i = int(close[0])
        raise GenericityViolated(tops[i], float(heights[i]))
    return {s: float(h) for s, h in zip(tops, heights)}


def _pick(
    K: SimplicialComplex, graph: DualGraph, heights: dict[Simplex, float], table: SideTable
) -> VerticalFreeness:
    """Smallest sink above M, else smallest source below M; ``Stuck`` when neither applies."""
    choice = next((s for s in graph.sinks() if heights[s] > 0), None)
    side = FreeSide.FROM_ABOVE
    if choice is None:
        choice = next((s for s in graph.sources() if heights[s] < 0), None)
        side = FreeSide.FROM_BELOW
    if choice is None:
        raise Stuck(len(graph), graph.to_dot())
    found = [c for c in candidates(K, choice, table) if c.side is side]
    if not found:
        logger.error("Non-crossing squash: %s is a %s but not free from that side", choice, side.value)
        raise Stuck(len(graph), graph.to_dot())
    return found[0]


def non_crossing_squash(
    P: ArrayLike,
    alpha: float,
    manifold: AnalyticManifold,
    cache: Optional[str | Path] = None,
) -> tuple[SimplicialComplex, SquashTrace]:
    """
    Simplify ``Del(P, alpha)`` by removing d-simplices whose circumcenter is off M.

    At each step the smallest sink whose circumcenter lies above M is
    collapsed from above; failing that, the smallest source whose
    circumcenter lies below M is collapsed from below.

    Raises:
        GenericityViolated: If a circumcenter lies on M within tolerance.
        Stuck: If neither branch applies while d-simplices remain; carries the
            dual graph as DOT text.
    """
    pts = as_points(getattr(P, "points", P))
    K = _initial_complex(pts, alpha, cache)
    d = K.ambient_dim
    tops = K.simplices(d)
    heights = _center_heights(K, tops, manifold)
    table = compute_side_table(K.points, tops, manifold, strict=False)
    graph = build_dual_graph(K, manifold, table) if tops else DualGraph(nodes=[])

    trace = SquashTrace(
        algorithm="non_crossing",
        initial_top_simplices=len(tops),
        initial_euler=K.euler_characteristic(),
    )
    while graph.nodes:
        cand = _pick(K, graph, heights, table)
        role = _role(graph, cand.sigma)
        before = K.euler_characteristic()
        record = K.collapse(cand.tau)
        after = K.euler_characteristic()
        graph.remove(cand.sigma)
        trace.steps.append(
            CollapseStep(
                step=len(trace.steps) + 1,
                tau=list(cand.tau),
                sigma=list(record.sigma),
                side=cand.side.value,
                removed=len(record.removed),
                euler_before=before,
                euler_after=after,
                dual_role=role,
                height=heights[cand.sigma],
            )
        )
    trace.terminal = TerminalState.of(K)
    logger.info("Non-crossing squash: %d collapses, %d simplices left", len(trace), len(K))
    return K, trace
