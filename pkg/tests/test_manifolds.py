"""
Unit Tests for the manifolds package.

Tests projection, normals, signed heights and tangent flats of the analytic
surfaces, the implicit polynomial surface and the text surface parser.
"""

import math
from pathlib import Path

import numpy as np
import pytest
import yaml

from src.errors import NearMedialAxis, NotOnManifold, SurfaceParseError
from src.manifolds import (
    CircleManifold,
    HyperplaneManifold,
    ImplicitManifold,
    SphereManifold,
    TorusManifold,
    parse_surface,
)
from src.manifolds.base import lattice_count


class TestProjection:
    """Test suite for nearest-point projection."""

    # -------------------------------------------------------------------------
    # Happy Path Tests
    # -------------------------------------------------------------------------

    def test_sphere_project(self, unit_sphere: SphereManifold) -> None:
        """Test projecting an outside point onto the unit sphere."""
        np.testing.assert_allclose(unit_sphere.project([2.0, 0.0, 0.0]), [1.0, 0.0, 0.0])

    def test_torus_project(self, torus: TorusManifold) -> None:
        """Test projecting a point inside the tube onto the torus."""
        np.testing.assert_allclose(torus.project([3.0, 0.0, 0.5]), [3.0, 0.0, 1.0], atol=1e-12)

    def test_circle_project_off_center(self) -> None:
        """Test projection onto a translated circle."""
        circle = CircleManifold(2.0, center=(1.0, 1.0))
        np.testing.assert_allclose(circle.project([1.0, 4.0]), [1.0, 3.0])

    def test_plane_project(self, ground_plane: HyperplaneManifold) -> None:
        """Test projection onto z = 0."""
        np.testing.assert_allclose(ground_plane.project([3.0, 4.0, -2.0]), [3.0, 4.0, 0.0])

    def test_project_many_batch(self, unit_sphere: SphereManifold) -> None:
        """Test that batched projection returns one foot per row."""
        proj = unit_sphere.project_many([[2.0, 0.0, 0.0], [0.0, 0.5, 0.0]])
        np.testing.assert_allclose(proj.feet, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        np.testing.assert_allclose(proj.distances, [1.0, 0.5])

    # -------------------------------------------------------------------------
    # Error Handling Tests
    # -------------------------------------------------------------------------

    def test_sphere_center_is_medial(self, unit_sphere: SphereManifold) -> None:
        """Test that the sphere center has no unique projection."""
        with pytest.raises(NearMedialAxis):
            unit_sphere.project([0.0, 0.0, 0.0])

    def test_distance_at_reach_raises(self, torus: TorusManifold) -> None:
        """Test that points one reach away from the torus are rejected."""
        with pytest.raises(NearMedialAxis):
            torus.project([3.0, 0.0, 0.0])

    def test_unchecked_projection_does_not_raise(self, unit_sphere: SphereManifold) -> None:
        """Test that check=False skips the tube test."""
        proj = unit_sphere.project_many([[0.0, 0.0, 0.1]], check=False)
        assert proj.feet.shape == (1, 3)


class TestNormalsAndHeights:
    """Test suite for normals, signed heights and tangent flats."""

    def test_sphere_normal(self, unit_sphere: SphereManifold) -> None:
        """Test the outward normal at the north pole."""
        np.testing.assert_allclose(unit_sphere.normal([0.0, 0.0, 1.0]), [0.0, 0.0, 1.0])

    def test_circle_normal(self) -> None:
        """Test the outward normal of a radius-2 circle."""
        circle = CircleManifold(2.0)
        np.testing.assert_allclose(circle.normal([2.0, 0.0]), [1.0, 0.0])

    def test_torus_normal(self, torus: TorusManifold) -> None:
        """Test the normal on the outer equator of the torus."""
        np.testing.assert_allclose(torus.normal([4.0, 0.0, 0.0]), [1.0, 0.0, 0.0], atol=1e-12)

    def test_normal_off_manifold_raises(self, unit_sphere: SphereManifold) -> None:
        """Test that normals are only defined on the manifold."""
        with pytest.raises(NotOnManifold):
            unit_sphere.normal([0.0, 0.0, 1.5])

    def test_alt_height_outside(self, unit_sphere: SphereManifold) -> None:
        """Test the positive height outside the sphere."""
        assert unit_sphere.alt_height([1.5, 0.0, 0.0]) == pytest.approx(0.5)

    def test_alt_height_inside(self, unit_sphere: SphereManifold) -> None:
        """Test the negative height inside the sphere."""
        assert unit_sphere.alt_height([0.5, 0.0, 0.0]) == pytest.approx(-0.5)

    def test_alt_height_plane(self, ground_plane: HyperplaneManifold) -> None:
        """Test the signed height below z = 0."""
        assert ground_plane.alt_height([3.0, 4.0, -2.0]) == pytest.approx(-2.0)

    def test_flipped_plane_negates_height(self, ground_plane: HyperplaneManifold) -> None:
        """Test that flipping the plane flips the sign of heights."""
        assert ground_plane.flipped().alt_height([0.0, 0.0, 1.0]) == pytest.approx(-1.0)

    def test_tangent_flat(self, unit_sphere: SphereManifold) -> None:
        """Test that the tangent flat at the north pole is z = 1."""
        flat = unit_sphere.tangent_flat([0.0, 0.0, 1.0])
        assert flat.dim == 2
        assert flat.contains([5.0, -3.0, 1.0])
        assert not flat.contains([0.0, 0.0, 0.0])

    def test_torus_lfs_bounded_by_reach(self, torus: TorusManifold) -> None:
        """Test that the local feature size never drops below the reach."""
        feet = torus.random_points(np.random.default_rng(0), 50)
        assert np.all(torus.lfs(feet) >= torus.reach - 1e-12)


class TestConstruction:
    """Test suite for manifold parameters."""

    def test_torus_reach(self) -> None:
        """Test the reach of a torus is its smaller radius."""
        assert TorusManifold(3.0, 1.0).reach == pytest.approx(1.0)
        assert TorusManifold(3.0, 2.0).reach == pytest.approx(1.0)

    def test_torus_invalid_radii(self) -> None:
        """Test that the tube cannot be wider than the core radius."""
        with pytest.raises(ValueError):
            TorusManifold(1.0, 2.0)

    def test_sphere_needs_3d_center(self) -> None:
        """Test that a sphere center has three coordinates."""
        with pytest.raises(ValueError):
            SphereManifold(1.0, center=(0.0, 0.0))

    def test_plane_has_infinite_reach(self, ground_plane: HyperplaneManifold) -> None:
        """Test that hyperplanes report an infinite reach."""
        assert ground_plane.reach_is_infinite

    def test_plane_zero_normal(self) -> None:
        """Test that a zero normal is rejected."""
        with pytest.raises(ValueError):
            HyperplaneManifold(normal=[0.0, 0.0], base=[0.0, 0.0])

    def test_random_points_lie_on_surface(self, torus: TorusManifold) -> None:
        """Test that random samples are on the torus."""
        pts = torus.random_points(np.random.default_rng(3), 200)
        assert pts.shape == (200, 3)
        assert np.max(torus.distance(pts)) < 1e-9

    def test_witness_grid_covering(self, unit_circle: CircleManifold) -> None:
        """Test that the circle grid covering radius respects the spacing."""
        grid = unit_circle.witness_grid(0.05)
        assert grid.covering <= 0.05
        assert len(grid) >= 2 * math.pi / 0.1

    def test_grid_for_caps_size(self, unit_sphere: SphereManifold) -> None:
        """Test that grid_for coarsens a grid that would exceed the cap."""
        grid = unit_sphere.grid_for(0.01, 0.1, max_points=500)
        assert len(grid) < 2000

    def test_lattice_count(self) -> None:
        """Test the step count for covering a length."""
        assert lattice_count(1.0, 0.25) == 4
        assert lattice_count(1.0, 0.3) == 4
        assert lattice_count(0.0, 1.0) == 1


class TestImplicitManifold:
    """Test suite for polynomial zero sets."""

    @pytest.fixture
    def sphere_file(self, tmp_path: Path) -> Path:
        """YAML file describing x^2 + y^2 + z^2 - 1 = 0."""
        path = tmp_path / "sphere.yaml"
        path.write_text(
            yaml.safe_dump(
                {
                    "dimension": 3,
                    "reach": 1.0,
                    "bounds": [[-1.5, -1.5, -1.5], [1.5, 1.5, 1.5]],
                    "terms": [
                        {"coeff": 1.0, "powers": [2, 0, 0]},
                        {"coeff": 1.0, "powers": [0, 2, 0]},
                        {"coeff": 1.0, "powers": [0, 0, 2]},
                        {"coeff": -1.0, "powers": [0, 0, 0]},
                    ],
                }
            ),
            encoding="utf-8",
        )
        return path

    def test_from_file_projection(self, sphere_file: Path) -> None:
        """Test that Newton projection matches the analytic sphere."""
        m = ImplicitManifold.from_file(sphere_file)
        np.testing.assert_allclose(m.project([2.0, 0.0, 0.0]), [1.0, 0.0, 0.0], atol=1e-8)
        np.testing.assert_allclose(m.project([0.0, 0.6, 0.8]), [0.0, 0.6, 0.8], atol=1e-8)

    def test_value_and_gradient(self, sphere_file: Path) -> None:
        """Test polynomial evaluation and its gradient."""
        m = ImplicitManifold.from_file(sphere_file)
        pts = np.array([[1.0, 2.0, 2.0]])
        assert m.value(pts)[0] == pytest.approx(8.0)
        np.testing.assert_allclose(m.gradient(pts)[0], [2.0, 4.0, 4.0])

    def test_reach_override(self, sphere_file: Path) -> None:
        """Test that an explicit reach wins over the file's value."""
        assert ImplicitManifold.from_file(sphere_file, reach=0.5).reach == pytest.approx(0.5)

    def test_missing_reach(self, tmp_path: Path) -> None:
        """Test that a file without a reach needs one from the caller."""
        path = tmp_path / "line.yaml"
        path.write_text(
            yaml.safe_dump(
                {
                    "dimension": 2,
                    "bounds": [[-1.0, -1.0], [1.0, 1.0]],
                    "terms": [{"coeff": 1.0, "powers": [0, 1]}],
                }
            ),
            encoding="utf-8",
        )
        with pytest.raises(SurfaceParseError):
            ImplicitManifold.from_file(path)

    def test_malformed_file(self, tmp_path: Path) -> None:
        """Test that schema violations are reported as parse errors."""
        path = tmp_path / "bad.yaml"
        path.write_text("dimension: 4\nbounds: []\nterms: []\n", encoding="utf-8")
        with pytest.raises(SurfaceParseError):
            ImplicitManifold.from_file(path)

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that an unreadable file is a parse error."""
        with pytest.raises(SurfaceParseError):
            ImplicitManifold.from_file(tmp_path / "nope.yaml")


class TestParseSurface:
    """Test suite for the surface text format."""

    def test_sphere_with_center(self) -> None:
        """Test parsing a translated sphere."""
        m = parse_surface("sphere r=2 c=1,0,0")
        assert isinstance(m, SphereManifold)
        assert m.reach == pytest.approx(2.0)
        np.testing.assert_allclose(m.project([4.0, 0.0, 0.0]), [3.0, 0.0, 0.0])

    def test_torus(self) -> None:
        """Test parsing a torus."""
        m = parse_surface("torus R=3 r=1")
        assert isinstance(m, TorusManifold)
        assert m.reach == pytest.approx(1.0)

    def test_plane_defaults(self) -> None:
        """Test that a plane defaults to passing through the origin."""
        m = parse_surface("plane n=0,0,1")
        assert isinstance(m, HyperplaneManifold)
        assert m.alt_height([0.0, 0.0, 2.0]) == pytest.approx(2.0)

    def test_describe_round_trips(self) -> None:
        """Test that describe produces a parseable description."""
        m = parse_surface(CircleManifold(1.0).describe())
        assert isinstance(m, CircleManifold)
        assert CircleManifold(1.0).describe() == "circle r=1 c=0,0"

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "cube r=1",
            "sphere",
            "sphere r=abc",
            "sphere radius=1",
            "torus R=3",
            "torus R=1 r=2",
            "sphere r",
        ],
    )
    def test_invalid_descriptions(self, text: str) -> None:
        """Test that malformed descriptions raise SurfaceParseError."""
        with pytest.raises(SurfaceParseError):
            parse_surface(text)
