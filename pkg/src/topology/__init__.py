"""Simplicial complexes, collapses and topology certificates."""

from src.topology.certificate import (
    TopologyCertificate,
    certify_topology,
    expected_euler,
    expected_topology,
)
from src.topology.complex import (
    CollapseRecord,
    SimplicialComplex,
    canonical,
    closure,
    embedding_violations,
    facets,
)

__all__ = [
    "CollapseRecord",
    "SimplicialComplex",
    "TopologyCertificate",
    "canonical",
    "certify_topology",
    "closure",
    "embedding_violations",
    "expected_euler",
    "expected_topology",
    "facets",
]
