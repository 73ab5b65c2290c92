"""
Unit Tests for the topology package.

Tests the simplicial complex (star, link, freeness, elementary collapses)
and the topology certificate.
"""

import math

import numpy as np
import pytest

from src.errors import DegenerateSimplex, FlatSimplex, NotEmbedded, NotFree, SimplexNotFound
from src.manifolds import SphereManifold, TorusManifold
from src.topology import (
    SimplicialComplex,
    canonical,
    certify_topology,
    closure,
    embedding_violations,
    expected_euler,
    expected_topology,
    facets,
)


@pytest.fixture
def triangle() -> SimplicialComplex:
    """Closure of a single triangle abc."""
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    return SimplicialComplex.from_simplices(pts, [(0, 1, 2)])


@pytest.fixture
def projective_plane() -> SimplicialComplex:
    """The six-vertex real projective plane, with arbitrary coordinates."""
    faces = [
        (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2),
        (2, 3, 5), (3, 4, 6), (4, 5, 2), (5, 6, 3), (6, 2, 4),
    ]
    pts = np.random.RandomState(0).normal(size=(6, 3))
    return SimplicialComplex.from_simplices(pts, [tuple(v - 1 for v in f) for f in faces], certify=False)


@pytest.fixture
def grid_torus() -> SimplicialComplex:
    """A 3x3 grid triangulation of the torus, placed on the (3, 1) torus."""
    n = 3

    def vid(i: int, j: int) -> int:
        return (i % n) * n + (j % n)

    faces = []
    for i in range(n):
        for j in range(n):
            faces.append((vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)))
            faces.append((vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)))
    u = 2 * math.pi * np.repeat(np.arange(n), n) / n
    v = 2 * math.pi * np.tile(np.arange(n), n) / n
    pts = np.column_stack(
        [(3 + np.cos(v)) * np.cos(u), (3 + np.cos(v)) * np.sin(u), np.sin(v)]
    )
    return SimplicialComplex.from_simplices(pts, faces, certify=False)


class TestHelpers:
    """Test suite for simplex helpers."""

    def test_canonical_sorts_and_dedups(self) -> None:
        """Test that canonical returns a sorted tuple of distinct ids."""
        assert canonical([3, 1, 3, 2]) == (1, 2, 3)

    def test_canonical_empty(self) -> None:
        """Test that the empty simplex is rejected."""
        with pytest.raises(ValueError):
            canonical([])

    def test_facets(self) -> None:
        """Test the codimension-one faces."""
        assert sorted(facets((0, 1, 2))) == [(0, 1), (0, 2), (1, 2)]
        assert facets((4,)) == []

    def test_closure_of_triangle(self) -> None:
        """Test that the closure of a triangle has seven simplices."""
        assert len(closure([(0, 1, 2)])) == 7


class TestSimplicialComplex:
    """Test suite for SimplicialComplex."""

    # -------------------------------------------------------------------------
    # Happy Path Tests
    # -------------------------------------------------------------------------

    def test_counts_and_euler(self, tetra: SimplicialComplex) -> None:
        """Test the f-vector and Euler characteristic of a closed tetrahedron."""
        assert [tetra.count(k) for k in range(4)] == [4, 6, 4, 1]
        assert tetra.euler_characteristic() == 1
        assert tetra.dim == 3

    def test_membership_is_order_free(self, triangle: SimplicialComplex) -> None:
        """Test that vertex order does not matter for membership."""
        assert (2, 0) in triangle
        assert (0, 3) not in triangle
        assert [0, 1] not in triangle

    def test_star_and_link(self, octahedron: SimplicialComplex) -> None:
        """Test that the link of an octahedron vertex is a 4-cycle."""
        link = octahedron.link((0,))
        assert link.count(0) == 4
        assert link.count(1) == 4
        assert link.euler_characteristic() == 0
        assert len(octahedron.star((0,))) == 1 + 4 + 4

    def test_top_cofaces(self, octahedron: SimplicialComplex) -> None:
        """Test that every octahedron vertex lies in four triangles."""
        assert len(octahedron.top_cofaces((4,), 2)) == 4

    def test_is_free(self, triangle: SimplicialComplex) -> None:
        """Test freeness of edges and vertices of a single triangle."""
        assert triangle.is_free((0, 1)) == (0, 1, 2)
        assert triangle.is_free((0,)) == (0, 1, 2)
        assert triangle.is_free((0, 1, 2)) is None

    def test_boundary_edge_of_two_triangles(self) -> None:
        """Test that a shared edge is not free."""
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        K = SimplicialComplex.from_simplices(pts, [(0, 1, 2), (1, 2, 3)])
        assert K.is_free((1, 2)) is None
        assert K.is_free((0, 1)) == (0, 1, 2)

    def test_collapse_edge_of_triangle(self, triangle: SimplicialComplex) -> None:
        """Test that collapsing ab out of abc leaves the other two edges."""
        record = triangle.collapse((0, 1))
        assert record.sigma == (0, 1, 2)
        assert triangle.as_set() == {(0,), (1,), (2,), (0, 2), (1, 2)}
        assert triangle.log == [record]

    def test_collapse_preserves_euler(self, tetra: SimplicialComplex) -> None:
        """Test that a collapse is a homotopy equivalence."""
        tetra.collapse((0, 1, 2))
        assert tetra.euler_characteristic() == 1
        assert (0, 1, 2, 3) not in tetra

    def test_boundary_of_tetrahedron(self, tetra: SimplicialComplex) -> None:
        """Test that the boundary of a tetrahedron is a 2-sphere."""
        boundary = tetra.boundary()
        assert boundary.count(2) == 4
        assert boundary.euler_characteristic() == 2

    def test_copy_is_independent(self, triangle: SimplicialComplex) -> None:
        """Test that mutating a copy leaves the original intact."""
        other = triangle.copy()
        other.collapse((0, 1))
        assert (0, 1, 2) in triangle
        assert (0, 1, 2) not in other

    def test_replay(self, tetra: SimplicialComplex) -> None:
        """Test that replaying a deletion log reproduces the final complex."""
        work = tetra.copy()
        work.collapse((0, 1, 2))
        work.collapse((0, 1))
        assert work.replay(tetra) == work

    def test_components(self) -> None:
        """Test connected components of two disjoint edges."""
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0], [6.0, 0.0]])
        K = SimplicialComplex.from_simplices(pts, [(0, 1), (2, 3)])
        assert K.components() == [{0, 1}, {2, 3}]

    def test_maximal_simplices(self, triangle: SimplicialComplex) -> None:
        """Test that only the triangle is maximal."""
        assert triangle.maximal_simplices() == [(0, 1, 2)]

    # -------------------------------------------------------------------------
    # Error Handling Tests
    # -------------------------------------------------------------------------

    def test_collapse_missing_simplex(self, triangle: SimplicialComplex) -> None:
        """Test that collapsing a simplex outside the complex raises."""
        with pytest.raises(SimplexNotFound):
            triangle.collapse((0, 7))

    def test_collapse_not_free(self, tetra_boundary: SimplicialComplex) -> None:
        """Test that a vertex of a closed surface is not free."""
        with pytest.raises(NotFree):
            tetra_boundary.collapse((0,))

    def test_from_simplices_missing_point(self) -> None:
        """Test that simplices must reference existing points."""
        with pytest.raises(ValueError):
            SimplicialComplex.from_simplices(np.zeros((2, 2)), [(0, 2)])

    def test_from_simplices_collinear_triangle(self) -> None:
        """Test that a triangle on three collinear points is rejected as degenerate."""
        with pytest.raises(DegenerateSimplex) as info:
            SimplicialComplex.from_simplices([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [(0, 1, 2)])
        assert isinstance(info.value, FlatSimplex)
        assert info.value.simplex == (0, 1, 2)
        assert info.value.rank == 1

    def test_from_simplices_crossing_diagonals(self) -> None:
        """Test that the two diagonals of a square do not form an embedded complex."""
        square = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]
        with pytest.raises(NotEmbedded) as info:
            SimplicialComplex.from_simplices(square, [(0, 1), (2, 3)])
        assert {info.value.simplex, info.value.other} == {(0, 1), (2, 3)}

    def test_from_simplices_overlapping_triangles(self) -> None:
        """Test that two coplanar triangles sharing an edge on the same side overlap."""
        pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.3, 0.3]]
        with pytest.raises(NotEmbedded):
            SimplicialComplex.from_simplices(pts, [(0, 1, 2), (0, 1, 3)])

    def test_unchecked_crossing(self) -> None:
        """Test that certify=False keeps the rank check but skips the crossing check."""
        square = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]
        K = SimplicialComplex.from_simplices(square, [(0, 1), (2, 3)], certify=False)
        assert K.count(1) == 2
        with pytest.raises(FlatSimplex):
            SimplicialComplex.from_simplices([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [(0, 1, 2)], certify=False)


class TestEmbedding:
    """Test suite for embedding_violations."""

    def test_closed_surfaces_are_embedded(
        self, octahedron: SimplicialComplex, tetra_boundary: SimplicialComplex
    ) -> None:
        """Test that faces of convex polytopes meet only in shared faces."""
        assert embedding_violations(octahedron.points, octahedron.maximal_simplices()) == []
        assert embedding_violations(tetra_boundary.points, tetra_boundary.maximal_simplices()) == []

    def test_shared_vertex_and_touching_edges(self) -> None:
        """Test that simplices meeting in a common vertex or collinear end to end are embedded."""
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 1.0], [2.0, 1.0]])
        assert embedding_violations(pts, [(0, 1), (1, 2), (1, 3, 4)]) == []

    def test_reports_every_crossing(self) -> None:
        """Test that a segment through two disjoint triangles crosses both."""
        pts = np.array(
            [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 2], [1, 0, 2], [0, 1, 2], [0.2, 0.2, -1], [0.2, 0.2, 3]],
            dtype=np.float64,
        )
        crossings = embedding_violations(pts, [(0, 1, 2), (3, 4, 5), (6, 7)])
        assert sorted(crossings) == [((6, 7), (0, 1, 2)), ((6, 7), (3, 4, 5))]

    def test_projective_plane_crosses(self, projective_plane: SimplicialComplex) -> None:
        """Test that a straight realization of the projective plane in space is never embedded."""
        crossings = embedding_violations(projective_plane.points, projective_plane.maximal_simplices(), first_only=True)
        assert len(crossings) == 1


class TestCertificate:
    """Test suite for certify_topology."""

    def test_expected_euler(self) -> None:
        """Test the Euler characteristics of named surfaces."""
        assert expected_euler("circle") == (1, 0)
        assert expected_euler("sphere") == (2, 2)
        assert expected_euler("torus") == (2, 0)
        assert expected_euler("genus-3") == (2, -4)
        with pytest.raises(ValueError):
            expected_euler("klein")

    def test_expected_topology(self, torus: TorusManifold) -> None:
        """Test that analytic kinds name their topology."""
        assert expected_topology(torus) == "torus"

    def test_tetra_boundary_is_sphere(self, tetra_boundary: SimplicialComplex) -> None:
        """Test that the tetrahedron boundary is certified as a sphere."""
        cert = certify_topology(tetra_boundary, "sphere")
        assert cert.matches
        assert cert.orientable
        assert cert.euler_characteristic == 2
        assert cert.genus == 0

    def test_octahedron_is_sphere(self, octahedron: SimplicialComplex) -> None:
        """Test the octahedron certificate, including projection injectivity."""
        cert = certify_topology(octahedron, "sphere", manifold=SphereManifold(1.0))
        assert cert.matches
        assert cert.projection_injective

    def test_polygon_is_circle(self, polygon: SimplicialComplex) -> None:
        """Test that a closed polygon is certified as a circle."""
        cert = certify_topology(polygon, "circle")
        assert cert.matches
        assert cert.num_components == 1

    def test_grid_torus(self, grid_torus: SimplicialComplex) -> None:
        """Test that the 3x3 grid torus has genus one."""
        cert = certify_topology(grid_torus, "torus")
        assert cert.is_closed_surface
        assert cert.euler_characteristic == 0
        assert cert.genus == 1
        assert cert.matches

    def test_projective_plane_not_orientable(self, projective_plane: SimplicialComplex) -> None:
        """Test that the projective plane is closed but not orientable."""
        cert = certify_topology(projective_plane, "sphere")
        assert cert.is_closed_surface
        assert not cert.orientable
        assert not cert.matches
        assert "not orientable" in cert.reasons

    def test_vertices_only_not_pure(self, tetra_points: np.ndarray) -> None:
        """Test that a complex of isolated vertices is not pure."""
        K = SimplicialComplex.from_simplices(tetra_points, [(i,) for i in range(4)])
        cert = certify_topology(K, "sphere")
        assert not cert.pure
        assert any(r.startswith("not pure (d-1)") for r in cert.reasons)

    def test_solid_tetra_not_surface(self, tetra: SimplicialComplex) -> None:
        """Test that a solid tetrahedron is not a closed surface."""
        cert = certify_topology(tetra, "sphere")
        assert not cert.matches
        assert not cert.is_closed_surface

    def test_wrong_dimension_reason(self, polygon: SimplicialComplex) -> None:
        """Test that a curve cannot be certified as a sphere."""
        cert = certify_topology(polygon, "sphere")
        assert not cert.matches
        assert any("not a hypersurface" in r for r in cert.reasons)
