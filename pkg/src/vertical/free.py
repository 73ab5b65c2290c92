"""
Vertically free simplices and the collapse worklist.

A simplex tau is vertically free when it is free with a d-dimensional
maximal coface sigma and the (d-1)-simplices of its star are exactly the
upper facets of sigma (free from above) or exactly its lower facets (free
from below). For a given sigma the only candidates are therefore the
intersection of its upper facets and the intersection of its lower facets.
"""

import heapq
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from src.errors import SquashError
from src.geometry.primitives import facet_normal
from src.manifolds.analytic import HyperplaneManifold
from src.manifolds.base import AnalyticManifold
from src.topology.complex import SimplicialComplex
from src.vertical.sides import SideTable, compute_side_table

logger = logging.getLogger(__name__)

Simplex = tuple[int, ...]


class FreeSide(str, Enum):
    FROM_ABOVE = "from_above"
    FROM_BELOW = "from_below"


@dataclass(frozen=True, order=True)
class VerticalFreeness:
    """A vertically free simplex, its maximal coface and the side it is free from."""

    tau: Simplex
    sigma: Simplex
    side: FreeSide

    @property
    def key(self) -> tuple[int, Simplex]:
        return len(self.tau) - 1, self.tau


def reference_hyperplane(points: Sequence[Sequence[float]], sigma: Sequence[int]) -> HyperplaneManifold:
    """Hyperplane spanned by the lexicographically smallest facet of ``sigma``."""
    s = tuple(sorted(sigma))
    facet = [points[v] for v in s[:-1]]
    normal = facet_normal(facet, points[s[-1]])
    return HyperplaneManifold.through_facet(facet, normal)


def _intersection(facets: list[Simplex]) -> Simplex:
    if not facets:
        return ()
    common = set(facets[0])
    for f in facets[1:]:
        common &= set(f)
    return tuple(sorted(common))


def _matches(K: SimplicialComplex, tau: Simplex, sigma: Simplex, side_facets: list[Simplex]) -> bool:
    if not tau or tau not in K or sigma not in K:
        return False
    if K.is_free(tau) != sigma:
        return False
    d = K.ambient_dim
    in_star = {s for s in K.star(tau) if len(s) == d}
    return in_star == set(side_facets)


def candidates(K: SimplicialComplex, sigma: Simplex, table: SideTable) -> list[VerticalFreeness]:
    """Vertically free simplices whose maximal coface is ``sigma``."""
    out = []
    above, below = table.above(sigma), table.below(sigma)
    for facets_, side in ((above, FreeSide.FROM_ABOVE), (below, FreeSide.FROM_BELOW)):
        tau = _intersection(facets_)
        if _matches(K, tau, sigma, facets_):
            out.append(VerticalFreeness(tau=tau, sigma=sigma, side=side))
    return out


def vertically_free(
    K: SimplicialComplex,
    tau: Sequence[int],
    reference: Optional[AnalyticManifold],
) -> Optional[VerticalFreeness]:
    """
    Decide whether ``tau`` is vertically free relative to ``reference``.

    ``reference=None`` uses the hyperplane spanned by the lexicographically
    smallest facet of the maximal coface.
    """
    t = tuple(sorted(int(v) for v in tau))
    sigma = K.is_free(t)
    d = K.ambient_dim
    if sigma is None or len(sigma) != d + 1:
        return None
    if reference is None:
        reference = reference_hyperplane(K.points, sigma)
    table = compute_side_table(K.points, [sigma], reference)
    for facets_, side in (
        (table.above(sigma), FreeSide.FROM_ABOVE),
        (table.below(sigma), FreeSide.FROM_BELOW),
    ):
        if _matches(K, t, sigma, facets_):
            return VerticalFreeness(tau=t, sigma=sigma, side=side)
    return None


class CollapseScheduler:
    """
    Worklist of vertically free simplices, popped in (dimension, vertex ids) order.

    Entries are revalidated when popped. After a collapse only d-simplices
    sharing a vertex with the removed coface can have changed status, so only
    those are re-examined.
    """

    def __init__(self, K: SimplicialComplex, table: SideTable):
        self.K = K
        self.table = table
        self._heap: list[tuple[tuple[int, Simplex], VerticalFreeness]] = []
        self._queued: set[VerticalFreeness] = set()

    @classmethod
    def for_reference(
        cls, K: SimplicialComplex, reference: Optional[AnalyticManifold], strict: bool = True
    ) -> "CollapseScheduler":
        d = K.ambient_dim
        table = compute_side_table(K.points, K.simplices(d), reference, strict=strict)
        scheduler = cls(K, table)
        for sigma in K.simplices(d):
            scheduler.examine(sigma)
        return scheduler

    def examine(self, sigma: Simplex) -> None:
        if sigma not in self.table:
            return
        if np.any(self.table.dots[self.table.index[sigma]] == 0.0):
            logger.debug("skipping %s: a facet is vertical to its reference", sigma)
            return
        try:
            found = candidates(self.K, sigma, self.table)
        except SquashError as e:
            logger.debug("skipping %s: %s", sigma, e)
            return
        for cand in found:
            if cand not in self._queued:
                self._queued.add(cand)
                heapq.heappush(self._heap, (cand.key, cand))

    def pop(self) -> Optional[VerticalFreeness]:
        """Smallest still-valid candidate, or ``None`` when there is none."""
        while self._heap:
            _, cand = heapq.heappop(self._heap)
            self._queued.discard(cand)
            if cand.side is FreeSide.FROM_ABOVE:
                facets_ = self.table.above(cand.sigma)
            else:
                facets_ = self.table.below(cand.sigma)
            if _matches(self.K, cand.tau, cand.sigma, facets_):
                return cand
        return None

    def after_collapse(self, sigma: Simplex) -> None:
        d = self.K.ambient_dim
        touched: set[Simplex] = set()
        for v in sigma:
            if (v,) in self.K:
                touched.update(self.K.top_cofaces((v,), d))
        for s in sorted(touched):
            self.examine(s)

