"""Restricted and core Delaunay complexes of a sample relative to a manifold."""

from src.restricted.delc import (
    RestrictedComplex,
    VoronoiEdges,
    Witness,
    core_delaunay,
    degenerate_witnesses,
    restricted_delaunay,
    voronoi_edges,
)
from src.restricted.pipeline import RestrictedRun, RestrictedSummary, restricted_pipeline

__all__ = [
    "RestrictedComplex",
    "RestrictedRun",
    "RestrictedSummary",
    "VoronoiEdges",
    "Witness",
    "core_delaunay",
    "degenerate_witnesses",
    "restricted_delaunay",
    "restricted_pipeline",
    "voronoi_edges",
]
