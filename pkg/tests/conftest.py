"""
Shared fixtures for the vertical-squash test suite.

Settings are cached per process and can be overridden through ``SQUASH_*``
environment variables, so every test starts from a clean cache and a clean
environment.
"""

import os
from itertools import combinations
from typing import Iterator

import numpy as np
import pytest

from src.config.settings import clear_settings_cache
from src.manifolds.analytic import CircleManifold, HyperplaneManifold, SphereManifold, TorusManifold
from src.topology.complex import SimplicialComplex


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch: pytest.MonkeyPatch) -> Iterator[None]:
    """Drop SQUASH_* overrides and the settings cache around every test."""
    for key in list(os.environ):
        if key.startswith("SQUASH_"):
            monkeypatch.delenv(key, raising=False)
    clear_settings_cache()
    yield
    for key in list(os.environ):
        if key.startswith("SQUASH_"):
            del os.environ[key]
    clear_settings_cache()


@pytest.fixture
def unit_sphere() -> SphereManifold:
    return SphereManifold(1.0)


@pytest.fixture
def unit_circle() -> CircleManifold:
    return CircleManifold(1.0)


@pytest.fixture
def torus() -> TorusManifold:
    return TorusManifold(3.0, 1.0)


@pytest.fixture
def ground_plane() -> HyperplaneManifold:
    """The plane z = 0 with normal +z."""
    return HyperplaneManifold(normal=[0.0, 0.0, 1.0], base=[0.0, 0.0, 0.0])


@pytest.fixture
def x_axis() -> HyperplaneManifold:
    """The x-axis in the plane with normal +y."""
    return HyperplaneManifold(normal=[0.0, 1.0], base=[0.0, 0.0])


@pytest.fixture
def tetra_points() -> np.ndarray:
    """A tetrahedron with one face parallel to z = 0."""
    return np.array(
        [
            [0.0, 0.0, 0.1],
            [1.0, 0.0, 0.1],
            [0.0, 1.0, 0.1],
            [0.2, 0.2, 0.6],
        ]
    )


@pytest.fixture
def tetra(tetra_points: np.ndarray) -> SimplicialComplex:
    """Closure of a single tetrahedron."""
    return SimplicialComplex.from_simplices(tetra_points, [(0, 1, 2, 3)])


@pytest.fixture
def tetra_boundary(tetra_points: np.ndarray) -> SimplicialComplex:
    """Boundary of a single tetrahedron: a 2-sphere."""
    return SimplicialComplex.from_simplices(tetra_points, list(combinations(range(4), 3)))


@pytest.fixture
def octahedron() -> SimplicialComplex:
    """Boundary of the octahedron with vertices on the unit sphere."""
    pts = np.array(
        [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
        dtype=np.float64,
    )
    faces = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    return SimplicialComplex.from_simplices(pts, faces)


@pytest.fixture
def polygon() -> SimplicialComplex:
    """A regular 12-gon inscribed in the unit circle."""
    t = 2.0 * np.pi * np.arange(12) / 12
    pts = np.column_stack([np.cos(t), np.sin(t)])
    return SimplicialComplex.from_simplices(pts, [(i, (i + 1) % 12) for i in range(12)])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
