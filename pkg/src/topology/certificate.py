"""
Combinatorial certificates that a complex triangulates a closed curve or surface.

For closed orientable surfaces the Euler characteristic together with the
number of components classifies the topology, so matching those against the
expected manifold (plus the local closed-surface checks) is the certificate.
"""

import logging
import re
from collections import defaultdict, deque
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field
from scipy.spatial import cKDTree

from src.manifolds.base import AnalyticManifold
from src.topology.complex import SimplicialComplex

logger = logging.getLogger(__name__)

_GENUS = re.compile(r"^genus-(\d+)$")


class TopologyCertificate(BaseModel):
    """Outcome of ``certify_topology``."""

    expected: str
    pure: bool = Field(description="Every maximal simplex has dimension d-1")
    is_closed_surface: bool
    euler_characteristic: int
    num_components: int
    orientable: bool
    vertex_links_ok: bool
    genus: Optional[int] = Field(default=None, description="Per-component genus when closed and orientable")
    projection_injective: Optional[bool] = None
    matches: bool
    reasons: list[str] = Field(default_factory=list)


def expected_euler(expected: str) -> tuple[int, int]:
    """(surface dimension, Euler characteristic) of a named closed manifold."""
    if expected == "circle":
        return 1, 0
    if expected == "sphere":
        return 2, 2
    if expected == "torus":
        return 2, 0
    m = _GENUS.match(expected)
    if m:
        return 2, 2 - 2 * int(m.group(1))
    raise ValueError(f"unknown expected topology {expected!r}")


def expected_topology(manifold: AnalyticManifold) -> Optional[str]:
    """Topology name for kinds whose topology is known from the description."""
    return {"circle": "circle", "sphere": "sphere", "torus": "torus"}.get(manifold.kind)


def _vertex_links_2d(K: SimplicialComplex) -> bool:
    """Every vertex link in a 2-complex is one cycle."""
    for (v,) in K.simplices(0):
        adjacency: dict[int, list[int]] = defaultdict(list)
        for tri in K.top_cofaces((v,), 2):
            a, b = [u for u in tri if u != v]
            adjacency[a].append(b)
            adjacency[b].append(a)
        if not adjacency or any(len(n) != 2 for n in adjacency.values()):
            return False
        start = next(iter(adjacency))
        seen = {start}
        prev, cur = None, start
        while True:
            nxt = adjacency[cur][0] if adjacency[cur][0] != prev else adjacency[cur][1]
            if nxt == start:
                break
            if nxt in seen:
                return False
            seen.add(nxt)
            prev, cur = cur, nxt
        if len(seen) != len(adjacency):
            return False
    return True


def _orientable(K: SimplicialComplex) -> bool:
    """Propagate triangle orientations across shared edges by BFS."""
    triangles = K.simplices(2)
    orientation: dict[tuple[int, ...], tuple[int, int, int]] = {}

    def directed_edges(t: tuple[int, int, int]) -> list[tuple[int, int]]:
        return [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]

    for seed in triangles:
        if seed in orientation:
            continue
        orientation[seed] = seed  # type: ignore[assignment]
        queue = deque([seed])
        while queue:
            t = queue.popleft()
            oriented = orientation[t]
            for a, b in directed_edges(oriented):
                edge = (min(a, b), max(a, b))
                for other in K.cofaces(edge):
                    if other == t:
                        continue
                    c = next(v for v in other if v not in edge)
                    # the neighbour must traverse the shared edge as b -> a
                    want = (b, a, c)
                    if other in orientation:
                        have = orientation[other]
                        if (b, a) not in directed_edges(have):
                            return False
                    else:
                        orientation[other] = want
                        queue.append(other)
    return True


def _projection_injective(K: SimplicialComplex, manifold: AnalyticManifold) -> bool:
    """Projected vertices and top-simplex barycenters are pairwise distinct."""
    top = K.simplices(K.dim)
    samples = [K.points[[s[0] for s in K.simplices(0)]]]
    if K.dim > 0 and top:
        samples.append(np.array([K.coordinates(s).mean(axis=0) for s in top]))
    feet = manifold.project_many(np.vstack(samples), check=False).feet
    return not cKDTree(feet).query_pairs(1e-9)


def certify_topology(
    K: SimplicialComplex,
    expected: str,
    manifold: Optional[AnalyticManifold] = None,
) -> TopologyCertificate:
    """
    Check that ``K`` triangulates the named closed manifold.

    Args:
        K: Complex over points in R^d
        expected: ``circle``, ``sphere``, ``torus`` or ``genus-g``
        manifold: When given, projection injectivity is sampled too

    Returns:
        A certificate; failures are listed in ``reasons``.
    """
    surface_dim, chi_expected = expected_euler(expected)
    d = K.ambient_dim
    reasons: list[str] = []
    if surface_dim != d - 1:
        reasons.append(f"{expected} is not a hypersurface of R^{d}")

    maximal = K.maximal_simplices()
    pure = bool(maximal) and all(len(s) == d for s in maximal)
    if not pure:
        reasons.append(f"not pure (d-1): maximal dimensions {sorted({len(s) - 1 for s in maximal})}")

    if d == 2:
        links_ok = all(len(K.cofaces(v)) == 2 for v in K.simplices(0))
        closed = pure and links_ok
        orientable = True
    else:
        edges_ok = all(len(K.cofaces(e)) == 2 for e in K.simplices(1))
        links_ok = edges_ok and _vertex_links_2d(K)
        closed = pure and links_ok
        orientable = _orientable(K) if closed else False
    if not links_ok:
        reasons.append("vertex links are not single cycles" if d == 3 else "some vertex degree is not 2")

    chi = K.euler_characteristic()
    components = len(K.components())
    if components != 1:
        reasons.append(f"{components} connected components")
    if chi != chi_expected:
        reasons.append(f"euler characteristic {chi}, expected {chi_expected}")
    if d == 3 and closed and not orientable:
        reasons.append("not orientable")

    genus = (2 - chi) // 2 if d == 3 and closed and orientable and components == 1 else None

    injective = None
    if manifold is not None and len(K):
        injective = _projection_injective(K, manifold)
        if not injective:
            reasons.append("projection onto the manifold is not injective on samples")

    cert = TopologyCertificate(
        expected=expected,
        pure=pure,
        is_closed_surface=closed,
        euler_characteristic=chi,
        num_components=components,
        orientable=orientable,
        vertex_links_ok=links_ok,
        genus=genus,
        projection_injective=injective,
        matches=not reasons,
        reasons=reasons,
    )
    logger.info(
        "Topology certificate (%s): chi=%d components=%d closed=%s -> %s",
        expected, chi, components, closed, "match" if cert.matches else "; ".join(reasons),
    )
    return cert
