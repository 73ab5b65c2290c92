"""Geometric primitives: robust predicates, spheres, flats and angles."""

from src.geometry.predicates import in_sphere, in_sphere_sos, orient
from src.geometry.primitives import (
    Flat,
    Sphere,
    angle_between_flats,
    angle_to_hyperplane,
    as_points,
    barycentric_grid,
    circumsphere,
    circumspheres,
    facet_normal,
    min_enclosing_sphere,
    simplex_directions,
)

__all__ = [
    "Flat",
    "Sphere",
    "angle_between_flats",
    "angle_to_hyperplane",
    "as_points",
    "barycentric_grid",
    "circumsphere",
    "circumspheres",
    "facet_normal",
    "in_sphere",
    "in_sphere_sos",
    "min_enclosing_sphere",
    "orient",
    "simplex_directions",
]
