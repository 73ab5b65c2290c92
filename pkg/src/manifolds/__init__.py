"""Analytic test manifolds with exact projection and normals."""

from src.manifolds.analytic import (
    CircleManifold,
    HyperplaneManifold,
    SphereManifold,
    TorusManifold,
)
from src.manifolds.base import REACH_SENTINEL, AnalyticManifold, Projection, WitnessGrid
from src.manifolds.implicit import ImplicitManifold
from src.manifolds.parse import parse_surface

__all__ = [
    "REACH_SENTINEL",
    "AnalyticManifold",
    "CircleManifold",
    "HyperplaneManifold",
    "ImplicitManifold",
    "Projection",
    "SphereManifold",
    "TorusManifold",
    "WitnessGrid",
    "parse_surface",
]
