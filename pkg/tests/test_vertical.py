"""
Unit Tests for the vertical package.

Tests angles with tangent spaces, verticality, upper/lower facets, the below
relation, vertically free simplices, the dual graph, vertical convexity and
the upper and lower skins.
"""

import math

import numpy as np
import pytest

from src.errors import OutsideTube, VerticalFacet
from src.manifolds import CircleManifold, HyperplaneManifold, SphereManifold
from src.topology import SimplicialComplex
from src.vertical import (
    BallUnion,
    CollapseScheduler,
    DualGraph,
    FacetSide,
    FreeSide,
    batch_angles,
    below_relation,
    build_dual_graph,
    check_tube,
    compute_side_table,
    facet_sides,
    is_vertical,
    max_angle_over_support,
    merge_intervals,
    min_angle_over_support,
    offset_of,
    reference_hyperplane,
    skins_and_subcomplexes,
    verify_vertical_convexity,
    vertex_angles,
    vertically_free,
)


@pytest.fixture
def two_triangles() -> SimplicialComplex:
    """Two triangles above the x-axis sharing the edge (1, 2)."""
    pts = np.array([[0.0, 0.1], [1.0, 0.1], [0.5, 0.6], [1.2, 0.8]])
    return SimplicialComplex.from_simplices(pts, [(0, 1, 2), (1, 2, 3)])


@pytest.fixture
def lone_triangle() -> SimplicialComplex:
    pts = np.array([[0.0, 0.1], [1.0, 0.1], [0.5, 0.6]])
    return SimplicialComplex.from_simplices(pts, [(0, 1, 2)])


class TestAngles:
    """Test suite for angles and verticality."""

    # -------------------------------------------------------------------------
    # Happy Path Tests
    # -------------------------------------------------------------------------

    def test_normal_edge_is_vertical(self, ground_plane: HyperplaneManifold) -> None:
        """Test that an edge along the plane normal is vertical."""
        assert is_vertical([(0.0, 0.0, 0.1), (0.0, 0.0, 0.4)], ground_plane)

    def test_horizontal_edge_is_not_vertical(self, ground_plane: HyperplaneManifold) -> None:
        """Test that an edge parallel to the plane is not vertical."""
        assert not is_vertical([(0.0, 0.0, 0.1), (1.0, 0.0, 0.1)], ground_plane)

    def test_radial_edge_is_vertical(self, unit_circle: CircleManifold) -> None:
        """Test that a radial edge near the circle is vertical."""
        assert is_vertical([(1.1, 0.0), (1.3, 0.0)], unit_circle)

    def test_vertex_is_never_vertical(self, unit_circle: CircleManifold) -> None:
        """Test that a single point has no two support points."""
        assert not is_vertical([(1.1, 0.0)], unit_circle)

    def test_tilted_edge_angle(self, ground_plane: HyperplaneManifold) -> None:
        """Test the angle of a 45 degree edge."""
        extreme = max_angle_over_support([(0.0, 0.0, 0.1), (1.0, 0.0, 1.1)], ground_plane)
        assert extreme.value == pytest.approx(math.pi / 4)

    def test_chord_extremes(self, unit_sphere: SphereManifold) -> None:
        """Test that a chord is steepest at its ends and flat at its midpoint."""
        chord = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]
        top = max_angle_over_support(chord, unit_sphere)
        bottom = min_angle_over_support(chord, unit_sphere)
        assert top.value == pytest.approx(math.pi / 4, abs=1e-9)
        assert bottom.vertex_value == pytest.approx(math.pi / 4, abs=1e-9)
        assert bottom.value == pytest.approx(0.0, abs=1e-4)
        np.testing.assert_allclose(bottom.point, [0.5, 0.5, 0.0], atol=1e-4)

    def test_vertex_angles(self, unit_sphere: SphereManifold) -> None:
        """Test the angles at each vertex of a chord."""
        angles = vertex_angles([(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)], unit_sphere)
        np.testing.assert_allclose(angles, [math.pi / 4, math.pi / 4])

    def test_batch_angles_match_vertex_angles(self, unit_sphere: SphereManifold) -> None:
        """Test that the batched evaluation agrees at the vertices."""
        pts = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        batch = batch_angles(pts, [(0, 1), (1, 2)], unit_sphere)
        for row, simplex in enumerate(batch.simplices):
            expected = vertex_angles(pts[list(simplex)], unit_sphere)
            np.testing.assert_allclose(batch.at_vertices[row], expected, atol=1e-12)
        assert np.all(batch.support_min <= batch.support_max)

    def test_tube_bound_within_reach(self, unit_sphere: SphereManifold) -> None:
        """Test that a small simplex near the sphere is inside the tube."""
        bound = check_tube((0, 1), [(1.0, 0.0, 0.0), (0.99, 0.1, 0.0)], unit_sphere)
        assert 0.0 < bound < 0.2

    # -------------------------------------------------------------------------
    # Error Handling Tests
    # -------------------------------------------------------------------------

    def test_outside_tube(self, unit_sphere: SphereManifold) -> None:
        """Test that a simplex near the sphere's center leaves the tube."""
        with pytest.raises(OutsideTube):
            is_vertical([(0.0, 0.0, 0.01), (0.1, 0.0, 0.01)], unit_sphere)


class TestFacetSides:
    """Test suite for upper and lower facets."""

    def test_triangle_above_axis(self, x_axis: HyperplaneManifold) -> None:
        """Test that the bottom edge is lower and the other two are upper."""
        pts = np.array([[0.0, 0.1], [1.0, 0.1], [0.5, 0.6]])
        sides = facet_sides(pts, (0, 1, 2), x_axis)
        assert sides[(0, 1)] is FacetSide.LOWER
        assert sides[(0, 2)] is FacetSide.UPPER
        assert sides[(1, 2)] is FacetSide.UPPER

    def test_own_reference_hyperplane(self) -> None:
        """Test that the smallest facet is upper relative to its own hyperplane."""
        pts = np.array([[0.0, 0.1], [1.0, 0.1], [0.5, 0.6]])
        table = compute_side_table(pts, [(0, 1, 2)], None)
        assert table.above((0, 1, 2)) == [(0, 1)]
        assert sorted(table.below((0, 1, 2))) == [(0, 2), (1, 2)]

    def test_below_relation(self, two_triangles: SimplicialComplex, x_axis: HyperplaneManifold) -> None:
        """Test that exactly one of two adjacent triangles is below the other."""
        pts = two_triangles.points
        assert below_relation(pts, (0, 1, 2), (1, 2, 3), x_axis)
        assert not below_relation(pts, (1, 2, 3), (0, 1, 2), x_axis)

    def test_below_relation_needs_shared_facet(self, x_axis: HyperplaneManifold) -> None:
        """Test that simplices without a common facet are rejected."""
        pts = np.array([[0.0, 0.1], [1.0, 0.1], [0.5, 0.6], [3.0, 0.1], [4.0, 0.1], [3.5, 0.6]])
        with pytest.raises(ValueError):
            below_relation(pts, (0, 1, 2), (3, 4, 5), x_axis)

    def test_vertical_facet_raises(self) -> None:
        """Test that a facet parallel to the normal is rejected in strict mode."""
        y_axis_normal = HyperplaneManifold(normal=[1.0, 0.0], base=[0.0, 0.0])
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(VerticalFacet):
            compute_side_table(pts, [(0, 1, 2)], y_axis_normal)
        table = compute_side_table(pts, [(0, 1, 2)], y_axis_normal, strict=False)
        assert table.vertical_facets() == [(0, 1)]


class TestVerticallyFree:
    """Test suite for vertical freeness and the collapse worklist."""

    def test_apex_free_from_above(
        self, lone_triangle: SimplicialComplex, x_axis: HyperplaneManifold
    ) -> None:
        """Test that the apex is free from above."""
        found = vertically_free(lone_triangle, (2,), x_axis)
        assert found is not None
        assert found.side is FreeSide.FROM_ABOVE
        assert found.sigma == (0, 1, 2)

    def test_bottom_edge_free_from_below(
        self, lone_triangle: SimplicialComplex, x_axis: HyperplaneManifold
    ) -> None:
        """Test that the bottom edge is free from below."""
        found = vertically_free(lone_triangle, (0, 1), x_axis)
        assert found is not None
        assert found.side is FreeSide.FROM_BELOW

    def test_side_edge_not_vertically_free(
        self, lone_triangle: SimplicialComplex, x_axis: HyperplaneManifold
    ) -> None:
        """Test that a free edge that is only part of the upper skin is not vertically free."""
        assert vertically_free(lone_triangle, (0, 2), x_axis) is None

    def test_reference_hyperplane(self) -> None:
        """Test that the reference hyperplane contains the smallest facet."""
        pts = np.array([[0.0, 0.1], [1.0, 0.1], [0.5, 0.6]])
        plane = reference_hyperplane(pts, (2, 0, 1))
        assert plane.alt_height([0.3, 0.1]) == pytest.approx(0.0, abs=1e-12)
        assert plane.alt_height([0.5, 0.6]) < 0

    def test_scheduler_order(self, lone_triangle: SimplicialComplex, x_axis: HyperplaneManifold) -> None:
        """Test that the worklist pops the lowest-dimensional candidate first."""
        scheduler = CollapseScheduler.for_reference(lone_triangle, x_axis)
        first = scheduler.pop()
        assert first is not None
        assert first.tau == (2,)
        lone_triangle.collapse(first.tau)
        scheduler.after_collapse(first.sigma)
        assert scheduler.pop() is None


class TestDualGraph:
    """Test suite for the dual graph."""

    def test_two_triangles(self, two_triangles: SimplicialComplex, x_axis: HyperplaneManifold) -> None:
        """Test the single arc of two stacked triangles."""
        graph = build_dual_graph(two_triangles, x_axis)
        assert graph.arcs() == [((0, 1, 2), (1, 2, 3))]
        assert graph.sinks() == [(1, 2, 3)]
        assert graph.sources() == [(0, 1, 2)]
        order, cycle = graph.topological_order()
        assert order == [(0, 1, 2), (1, 2, 3)]
        assert cycle is None

    def test_circumcenter_heights_increase(
        self, two_triangles: SimplicialComplex, x_axis: HyperplaneManifold
    ) -> None:
        """Test that heights strictly increase along arcs of a Delaunay complex."""
        graph = build_dual_graph(two_triangles, x_axis)
        assert graph.heights[(0, 1, 2)] == pytest.approx(0.1)
        assert graph.height_violations() == []

    def test_cycle_detection(self) -> None:
        """Test that a directed triangle of nodes is reported as a cycle."""
        a, b, c = (0, 1, 2), (1, 2, 3), (2, 3, 4)
        graph = DualGraph(nodes=[a, b, c])
        graph.add_arc(a, b, (1, 2))
        graph.add_arc(b, c, (2, 3))
        graph.add_arc(c, a, (2,))
        order, cycle = graph.topological_order()
        assert order is None
        assert cycle is not None
        assert sorted(cycle) == [a, b, c]

    def test_remove_node(self, two_triangles: SimplicialComplex, x_axis: HyperplaneManifold) -> None:
        """Test that removing a node drops its arcs."""
        graph = build_dual_graph(two_triangles, x_axis)
        graph.remove((1, 2, 3))
        assert graph.arcs() == []
        assert graph.sinks() == [(0, 1, 2)]

    def test_to_dot(self, two_triangles: SimplicialComplex, x_axis: HyperplaneManifold) -> None:
        """Test the Graphviz export."""
        dot = build_dual_graph(two_triangles, x_axis).to_dot()
        assert dot.startswith("digraph dual {")
        assert '"0-1-2" -> "1-2-3";' in dot


class TestVerticalConvexity:
    """Test suite for vertical convexity and the skins."""

    def test_merge_intervals(self) -> None:
        """Test merging of touching and disjoint intervals."""
        assert merge_intervals([(0.0, 1.0), (1.0, 2.0), (3.0, 4.0)]) == [(0.0, 2.0), (3.0, 4.0)]
        assert merge_intervals([]) == []

    def test_ball_ring_is_convex(self, unit_circle: CircleManifold) -> None:
        """Test that a dense ring of balls is vertically convex and covers the circle."""
        t = 2 * np.pi * np.arange(60) / 60
        pts = np.column_stack([np.cos(t), np.sin(t)])
        report = verify_vertical_convexity(offset_of(pts, 0.1), unit_circle)
        assert report.vertically_convex
        assert report.covering_projection

    def test_stacked_balls_not_convex(self, x_axis: HyperplaneManifold) -> None:
        """Test that two balls stacked along the normal break vertical convexity."""
        balls = BallUnion(centers=np.array([[0.0, 0.0], [0.0, 0.5]]), radius=0.1)
        report = verify_vertical_convexity(balls, x_axis)
        assert not report.vertically_convex
        assert report.max_pieces == 2
        assert report.violating_points

    def test_triangle_is_convex(self, lone_triangle: SimplicialComplex, x_axis: HyperplaneManifold) -> None:
        """Test that a single triangle is vertically convex but does not cover the patch."""
        report = verify_vertical_convexity(lone_triangle, x_axis)
        assert report.vertically_convex
        assert 0 < report.covered < report.witnesses

    def test_skins_of_triangle(self, lone_triangle: SimplicialComplex, x_axis: HyperplaneManifold) -> None:
        """Test the upper and lower skins of a triangle."""
        skins = skins_and_subcomplexes(lone_triangle, x_axis)
        assert skins.upper.simplices(1) == [(0, 2), (1, 2)]
        assert skins.lower.simplices(1) == [(0, 1)]
        assert skins.both == []

    def test_dangling_edge_in_both_skins(self, x_axis: HyperplaneManifold) -> None:
        """Test that a boundary edge without a triangle lies in both skins."""
        pts = np.array([[0.0, 0.1], [1.0, 0.1], [0.5, 0.6], [2.0, 0.1]])
        K = SimplicialComplex.from_simplices(pts, [(0, 1, 2), (1, 3)])
        skins = skins_and_subcomplexes(K, x_axis)
        assert skins.both == [(1, 3)]
        assert (1, 3) in skins.upper
        assert (1, 3) in skins.lower
