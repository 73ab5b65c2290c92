"""
Dual graph of the d-simplices, directed by the below relation.

There is one node per d-simplex and one arc per shared facet, pointing from
the simplex for which the facet is upper to the one for which it is lower.
Nodes carry the signed height of their circumcenter.
"""

import heapq
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.errors import NearMedialAxis, VerticalFacet
from src.geometry.primitives import circumspheres
from src.manifolds.base import AnalyticManifold
from src.topology.complex import SimplicialComplex
from src.vertical.sides import FacetSide, SideTable, compute_side_table

logger = logging.getLogger(__name__)

Simplex = tuple[int, ...]


def _label(s: Simplex) -> str:
    return "-".join(str(v) for v in s)


@dataclass
class DualGraph:
    """Directed dual graph with per-node circumcenter heights."""

    nodes: list[Simplex]
    succ: dict[Simplex, set[Simplex]] = field(default_factory=dict)
    pred: dict[Simplex, set[Simplex]] = field(default_factory=dict)
    heights: dict[Simplex, Optional[float]] = field(default_factory=dict)
    arc_facets: dict[tuple[Simplex, Simplex], Simplex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for s in self.nodes:
            self.succ.setdefault(s, set())
            self.pred.setdefault(s, set())

    def __len__(self) -> int:
        return len(self.nodes)

    def add_arc(self, lower: Simplex, upper: Simplex, facet: Simplex) -> None:
        self.succ[lower].add(upper)
        self.pred[upper].add(lower)
        self.arc_facets[(lower, upper)] = facet

    def arcs(self) -> list[tuple[Simplex, Simplex]]:
        return sorted(self.arc_facets)

    def sinks(self) -> list[Simplex]:
        """Nodes without outgoing arcs: every upper facet is on the boundary."""
        return sorted(s for s in self.nodes if not self.succ[s])

    def sources(self) -> list[Simplex]:
        return sorted(s for s in self.nodes if not self.pred[s])

    def remove(self, node: Simplex) -> None:
        for t in self.succ.pop(node, set()):
            self.pred[t].discard(node)
            self.arc_facets.pop((node, t), None)
        for t in self.pred.pop(node, set()):
            self.succ[t].discard(node)
            self.arc_facets.pop((t, node), None)
        self.heights.pop(node, None)
        self.nodes.remove(node)

    def topological_order(self) -> tuple[Optional[list[Simplex]], Optional[list[Simplex]]]:
        """
        A topological order of the nodes, or a directed cycle.

        Returns:
            ``(order, None)`` when the graph is acyclic, ``(None, cycle)`` otherwise.
        """
        indegree = {s: len(self.pred[s]) for s in self.nodes}
        ready = [s for s, k in indegree.items() if k == 0]
        heapq.heapify(ready)
        order: list[Simplex] = []
        while ready:
            s = heapq.heappop(ready)
            order.append(s)
            for t in sorted(self.succ[s]):
                indegree[t] -= 1
                if indegree[t] == 0:
                    heapq.heappush(ready, t)
        if len(order) == len(self.nodes):
            return order, None
        return None, self._find_cycle({s for s, k in indegree.items() if k > 0})

    def _find_cycle(self, remaining: set[Simplex]) -> list[Simplex]:
        # every remaining node has a predecessor among the remaining ones
        start = min(remaining)
        seen: dict[Simplex, int] = {}
        path: list[Simplex] = []
        cur = start
        while cur not in seen:
            seen[cur] = len(path)
            path.append(cur)
            cur = min(p for p in self.pred[cur] if p in remaining)
        cycle = path[seen[cur]:]
        cycle.reverse()
        return cycle

    def height_violations(self) -> list[tuple[Simplex, Simplex]]:
        """Arcs along which the circumcenter height does not strictly increase."""
        out = []
        for a, b in self.arcs():
            ha, hb = self.heights.get(a), self.heights.get(b)
            if ha is None or hb is None or not ha < hb:
                out.append((a, b))
        return out

    def to_dot(self) -> str:
        lines = ["digraph dual {"]
        for s in sorted(self.nodes):
            h = self.heights.get(s)
            alt = "n/a" if h is None else f"{h:.6g}"
            lines.append(f'  "{_label(s)}" [label="{_label(s)}\\nalt={alt}"];')
        for a, b in self.arcs():
            lines.append(f'  "{_label(a)}" -> "{_label(b)}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def circumcenter_heights(
    K: SimplicialComplex, simplices: list[Simplex], manifold: AnalyticManifold
) -> dict[Simplex, Optional[float]]:
    """Signed height of each circumcenter; ``None`` where it is beyond the reach."""
    if not simplices:
        return {}
    centers, _ = circumspheres(K.points, np.asarray(simplices, dtype=np.int64))
    out: dict[Simplex, Optional[float]] = {}
    finite = ~np.isnan(centers).any(axis=1)
    safe = np.where(finite[:, np.newaxis], centers, 0.0)
    try:
        proj = manifold.project_many(safe, check=False)
        heights, distances = proj.heights, proj.distances
    except NearMedialAxis:
        heights, distances = _one_by_one(manifold, safe)
    for s, ok, h, dist in zip(simplices, finite, heights, distances):
        out[s] = float(h) if ok and dist < manifold.reach else None
    return out


def _one_by_one(manifold: AnalyticManifold, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    heights = np.zeros(points.shape[0])
    distances = np.full(points.shape[0], np.inf)
    for i, x in enumerate(points):
        try:
            proj = manifold.project_many(x, check=False)
        except NearMedialAxis:
            continue
        heights[i], distances[i] = proj.heights[0], proj.distances[0]
    return heights, distances


def build_dual_graph(
    K: SimplicialComplex,
    manifold: AnalyticManifold,
    table: Optional[SideTable] = None,
) -> DualGraph:
    """
    Dual graph of ``K`` relative to ``manifold``.

    Raises:
        VerticalFacet: If a shared facet gets the same side from both cofaces.
    """
    d = K.ambient_dim
    tops = K.simplices(d)
    if table is None:
        table = compute_side_table(K.points, tops, manifold)
    graph = DualGraph(nodes=list(tops))
    for facet in K.simplices(d - 1):
        cofaces = K.cofaces(facet)
        if len(cofaces) != 2:
            continue
        a, b = cofaces
        side_a, side_b = table.side_of(a, facet), table.side_of(b, facet)
        if side_a == side_b:
            raise VerticalFacet(facet, "both cofaces put the shared facet on the same side")
        if side_a is FacetSide.UPPER:
            graph.add_arc(a, b, facet)
        else:
            graph.add_arc(b, a, facet)
    graph.heights = circumcenter_heights(K, tops, manifold)
    logger.info(
        "Dual graph: %d nodes, %d arcs, %d sinks, %d sources",
        len(graph.nodes), len(graph.arc_facets), len(graph.sinks()), len(graph.sources()),
    )
    return graph
