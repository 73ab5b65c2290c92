"""
Unit Tests for the geometry package.

Tests robust predicates, circumspheres, minimum enclosing spheres and the
angle between flats.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import DegenerateSimplex, ZeroDimFlat
from src.geometry import (
    Flat,
    angle_between_flats,
    angle_to_hyperplane,
    as_points,
    barycentric_grid,
    circumsphere,
    circumspheres,
    facet_normal,
    in_sphere,
    in_sphere_sos,
    min_enclosing_sphere,
    orient,
)


class TestPredicates:
    """Test suite for orient and in_sphere."""

    @pytest.fixture
    def right_triangle(self) -> list[tuple[float, float]]:
        """The unit right triangle, positively oriented."""
        return [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]

    # -------------------------------------------------------------------------
    # Happy Path Tests
    # -------------------------------------------------------------------------

    def test_orient_ccw_triangle(self, right_triangle: list[tuple[float, float]]) -> None:
        """Test that a counter-clockwise triangle is positively oriented."""
        assert orient(right_triangle) == 1

    def test_orient_swapped_triangle(self, right_triangle: list[tuple[float, float]]) -> None:
        """Test that swapping two vertices flips the sign."""
        a, b, c = right_triangle
        assert orient([a, c, b]) == -1

    def test_orient_collinear(self) -> None:
        """Test that collinear points have zero orientation."""
        assert orient([(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]) == 0

    def test_orient_tetrahedron_below(self) -> None:
        """Test that a tetrahedron with its apex below z=0 is negative."""
        pts = [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, -1.0)]
        assert orient(pts) == -1

    def test_orient_coplanar_tetrahedron(self) -> None:
        """Test that four coplanar points have zero orientation."""
        pts = [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (1.0, 1.0, 0.0)]
        assert orient(pts) == 0

    def test_orient_nearly_collinear_is_exact(self) -> None:
        """Test that a tiny perturbation off a line is still detected."""
        assert orient([(0.0, 0.0), (1.0, 1.0), (2.0, 2.0 + 1e-15)]) == 1

    def test_in_sphere_on_circle(self, right_triangle: list[tuple[float, float]]) -> None:
        """Test that the fourth corner of the square is cocircular."""
        assert in_sphere(right_triangle, (1.0, 1.0)) == 0

    def test_in_sphere_inside(self, right_triangle: list[tuple[float, float]]) -> None:
        """Test that the circumcenter is inside."""
        assert in_sphere(right_triangle, (0.5, 0.5)) == 1

    def test_in_sphere_outside(self, right_triangle: list[tuple[float, float]]) -> None:
        """Test that a far point is outside."""
        assert in_sphere(right_triangle, (5.0, 5.0)) == -1

    def test_in_sphere_independent_of_orientation(
        self, right_triangle: list[tuple[float, float]]
    ) -> None:
        """Test that a clockwise simplex gives the same answer."""
        a, b, c = right_triangle
        assert in_sphere([a, c, b], (0.5, 0.5)) == 1
        assert in_sphere([a, c, b], (5.0, 5.0)) == -1

    def test_in_sphere_3d(self) -> None:
        """Test in_sphere against the circumsphere of a tetrahedron."""
        pts = [(1.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]
        assert in_sphere(pts, (0.0, 0.0, 0.0)) == 1
        assert in_sphere(pts, (0.0, -1.0, 0.0)) == 0
        assert in_sphere(pts, (0.0, 0.0, 3.0)) == -1

    def test_in_sphere_sos_breaks_ties(
        self, right_triangle: list[tuple[float, float]]
    ) -> None:
        """Test that simulated simplicity never returns zero on a cocircular query."""
        result = in_sphere_sos(right_triangle, [0, 1, 2], (1.0, 1.0), 3)
        assert result in (-1, 1)

    def test_in_sphere_sos_is_deterministic(
        self, right_triangle: list[tuple[float, float]]
    ) -> None:
        """Test that the tie break depends only on the indices."""
        first = in_sphere_sos(right_triangle, [0, 1, 2], (1.0, 1.0), 3)
        second = in_sphere_sos(right_triangle, [0, 1, 2], (1.0, 1.0), 3)
        assert first == second

    def test_in_sphere_sos_matches_exact_when_not_tied(
        self, right_triangle: list[tuple[float, float]]
    ) -> None:
        """Test that the perturbation is invisible off the sphere."""
        assert in_sphere_sos(right_triangle, [0, 1, 2], (0.5, 0.5), 3) == 1
        assert in_sphere_sos(right_triangle, [0, 1, 2], (5.0, 5.0), 3) == -1

    # -------------------------------------------------------------------------
    # Error Handling Tests
    # -------------------------------------------------------------------------

    def test_in_sphere_degenerate_simplex(self) -> None:
        """Test that a flat simplex has no circumsphere."""
        with pytest.raises(DegenerateSimplex):
            in_sphere([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], (0.5, 0.5))

    def test_orient_wrong_count(self) -> None:
        """Test that orient rejects point counts other than d+1."""
        with pytest.raises(ValueError):
            orient([(0.0, 0.0), (1.0, 0.0)])


class TestCircumsphere:
    """Test suite for circumsphere and circumspheres."""

    def test_segment(self) -> None:
        """Test the circumsphere of a segment is its diametral sphere."""
        s = circumsphere([(0.0, 0.0), (2.0, 0.0)])
        np.testing.assert_allclose(s.center, [1.0, 0.0])
        assert s.radius == pytest.approx(1.0)

    def test_single_point(self) -> None:
        """Test that a vertex has radius zero."""
        s = circumsphere([(3.0, 4.0)])
        assert s.radius == 0.0

    def test_equilateral_triangle(self) -> None:
        """Test the circumradius of a unit equilateral triangle."""
        s = circumsphere([(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)])
        assert s.radius == pytest.approx(1.0 / math.sqrt(3))

    def test_regular_tetrahedron(self) -> None:
        """Test the circumradius of a regular tetrahedron with unit edges."""
        pts = np.array(
            [
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.5, math.sqrt(3) / 2, 0.0],
                [0.5, math.sqrt(3) / 6, math.sqrt(2.0 / 3.0)],
            ]
        )
        s = circumsphere(pts)
        assert s.radius == pytest.approx(math.sqrt(3.0 / 8.0))
        for p in pts:
            assert np.linalg.norm(p - s.center) == pytest.approx(s.radius)

    def test_triangle_in_3d_center_in_plane(self) -> None:
        """Test that a lower-dimensional simplex gets the smallest circumsphere."""
        s = circumsphere([(0.0, 0.0, 5.0), (2.0, 0.0, 5.0), (0.0, 2.0, 5.0)])
        np.testing.assert_allclose(s.center, [1.0, 1.0, 5.0])
        assert s.radius == pytest.approx(math.sqrt(2.0))

    def test_collinear_raises(self) -> None:
        """Test that dependent points raise DegenerateSimplex."""
        with pytest.raises(DegenerateSimplex):
            circumsphere([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])

    def test_batched_matches_single(self) -> None:
        """Test that the batched form agrees with the scalar form."""
        pts = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [3.0, 3.0]])
        simplices = np.array([[0, 1, 2], [1, 2, 3]])
        centers, radii2 = circumspheres(pts, simplices)
        for row, simplex in enumerate(simplices):
            s = circumsphere(pts[simplex])
            np.testing.assert_allclose(centers[row], s.center, atol=1e-12)
            assert radii2[row] == pytest.approx(s.radius2)

    def test_batched_degenerate_is_nan(self) -> None:
        """Test that degenerate simplices produce nan rather than raising."""
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
        centers, radii2 = circumspheres(pts, np.array([[0, 1, 2], [0, 1, 3]]))
        assert np.isnan(radii2[0])
        assert np.all(np.isnan(centers[0]))
        assert radii2[1] == pytest.approx(0.5)


class TestMinEnclosingSphere:
    """Test suite for min_enclosing_sphere."""

    def test_single_point(self) -> None:
        """Test that one point gives a zero-radius sphere."""
        s = min_enclosing_sphere([(1.0, 2.0)])
        assert s.radius == 0.0
        np.testing.assert_allclose(s.center, [1.0, 2.0])

    def test_two_points(self) -> None:
        """Test that two points give the diametral sphere."""
        s = min_enclosing_sphere([(0.0, 0.0), (2.0, 0.0)])
        np.testing.assert_allclose(s.center, [1.0, 0.0], atol=1e-12)
        assert s.radius == pytest.approx(1.0)

    def test_obtuse_triangle(self) -> None:
        """Test that an obtuse triangle is enclosed by its longest edge's sphere."""
        s = min_enclosing_sphere([(0.0, 0.0), (4.0, 0.0), (1.0, 0.5)])
        np.testing.assert_allclose(s.center, [2.0, 0.0], atol=1e-12)
        assert s.radius == pytest.approx(2.0)

    def test_acute_triangle_is_circumsphere(self) -> None:
        """Test that an acute triangle's enclosing sphere is its circumsphere."""
        pts = [(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)]
        assert min_enclosing_sphere(pts).radius == pytest.approx(1.0 / math.sqrt(3))

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**31 - 1))
    def test_encloses_random_cloud(self, seed: int) -> None:
        """Test that every point lies in the computed ball."""
        pts = np.random.RandomState(seed).normal(size=(30, 3))
        s = min_enclosing_sphere(pts)
        dists = np.linalg.norm(pts - s.center, axis=1)
        assert np.all(dists <= s.radius * (1 + 1e-9) + 1e-12)
        # at least one point on the boundary
        assert dists.max() == pytest.approx(s.radius, rel=1e-9)


class TestFlats:
    """Test suite for Flat and the angle between flats."""

    @pytest.fixture
    def xy_plane(self) -> Flat:
        return Flat.spanned_by([(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)])

    def test_spanned_by_dimension(self, xy_plane: Flat) -> None:
        """Test that three independent points span a 2-flat."""
        assert xy_plane.dim == 2
        assert xy_plane.ambient_dim == 3

    def test_spanned_by_dependent_points(self) -> None:
        """Test that collinear points span a line."""
        line = Flat.spanned_by([(0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (2.0, 2.0, 2.0)])
        assert line.dim == 1

    def test_hyperplane_projection(self) -> None:
        """Test projecting onto the hyperplane z = 1."""
        h = Flat.hyperplane([0.0, 0.0, 1.0], [0.0, 0.0, 2.0])
        np.testing.assert_allclose(h.project([3.0, -2.0, 7.0]), [3.0, -2.0, 1.0])
        assert h.contains([5.0, 5.0, 1.0])
        assert not h.contains([5.0, 5.0, 1.1])

    def test_angle_same_plane(self, xy_plane: Flat) -> None:
        """Test that a flat makes zero angle with itself."""
        assert angle_between_flats(xy_plane, xy_plane) == pytest.approx(0.0, abs=1e-12)

    def test_angle_normal_line(self, xy_plane: Flat) -> None:
        """Test that the z-axis is orthogonal to the xy-plane."""
        z_axis = Flat.spanned_by([(0.0, 0.0, 0.0), (0.0, 0.0, 1.0)])
        assert angle_between_flats(z_axis, xy_plane) == pytest.approx(math.pi / 2)

    def test_angle_is_asymmetric(self, xy_plane: Flat) -> None:
        """Test that a plane against a contained line is a right angle."""
        x_axis = Flat.spanned_by([(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)])
        assert angle_between_flats(x_axis, xy_plane) == pytest.approx(0.0, abs=1e-12)
        assert angle_between_flats(xy_plane, x_axis) == pytest.approx(math.pi / 2)

    def test_angle_tilted_line(self, xy_plane: Flat) -> None:
        """Test a 45 degree line against the xy-plane."""
        line = Flat.spanned_by([(0.0, 0.0, 0.0), (1.0, 0.0, 1.0)])
        assert angle_between_flats(line, xy_plane) == pytest.approx(math.pi / 4)

    def test_angle_from_point_raises(self, xy_plane: Flat) -> None:
        """Test that the angle from a 0-flat is undefined."""
        point = Flat.spanned_by([(1.0, 1.0, 1.0)])
        with pytest.raises(ZeroDimFlat):
            angle_between_flats(point, xy_plane)

    def test_angle_to_hyperplane_batch(self) -> None:
        """Test the batched angle against several tangent planes."""
        directions = np.array([[1.0, 0.0, 0.0]])
        normals = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [math.sqrt(0.5), 0.0, math.sqrt(0.5)]])
        angles = angle_to_hyperplane(directions, normals)
        np.testing.assert_allclose(angles, [0.0, math.pi / 2, math.pi / 4], atol=1e-12)


class TestHelpers:
    """Test suite for small geometric helpers."""

    def test_as_points_promotes_vector(self) -> None:
        """Test that a single point becomes a one-row batch."""
        assert as_points([1.0, 2.0]).shape == (1, 2)

    def test_as_points_rejects_non_finite(self) -> None:
        """Test that nan coordinates are rejected."""
        with pytest.raises(ValueError):
            as_points([[0.0, float("nan")]])

    def test_barycentric_grid_weights(self) -> None:
        """Test that grid weights are nonnegative and sum to one."""
        grid = barycentric_grid(2, 3)
        assert grid.shape == (10, 3)
        np.testing.assert_allclose(grid.sum(axis=1), 1.0)
        assert np.all(grid >= 0)

    def test_facet_normal_points_away(self) -> None:
        """Test that the facet normal points away from the opposite vertex."""
        n = facet_normal([(0.0, 0.0), (1.0, 0.0)], (0.5, 1.0))
        np.testing.assert_allclose(n, [0.0, -1.0])

    def test_facet_normal_3d(self) -> None:
        """Test the facet normal of a horizontal triangle."""
        n = facet_normal([(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)], (0.0, 0.0, -1.0))
        np.testing.assert_allclose(n, [0.0, 0.0, 1.0])
