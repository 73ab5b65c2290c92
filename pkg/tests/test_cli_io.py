"""
Unit Tests for file formats and run reports.

Tests XYZ, PLY, OFF and edge-list IO, the RunConfig model with its ratio
resolution, and the JSON run report.
"""

from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from src.cli_io import (
    REPORT_SCHEMA_VERSION,
    Mode,
    RunConfig,
    RunReport,
    load_complex,
    load_points,
    read_off,
    read_ply,
    read_report,
    read_xyz,
    report_json,
    report_schema,
    save_complex,
    save_points,
    write_off,
    write_report,
)
from src.errors import FormatError
from src.topology import SimplicialComplex


class TestPointFiles:
    """Test suite for point cloud files."""

    @pytest.fixture
    def cloud(self) -> np.ndarray:
        return np.random.RandomState(3).normal(size=(25, 3))

    # -------------------------------------------------------------------------
    # Happy Path Tests
    # -------------------------------------------------------------------------

    def test_xyz_is_exact(self, tmp_path: Path, cloud: np.ndarray) -> None:
        """Test that XYZ keeps every bit of the coordinates."""
        path = save_points(tmp_path / "cloud.xyz", cloud)
        np.testing.assert_array_equal(load_points(path), cloud)

    def test_ply_points(self, tmp_path: Path, cloud: np.ndarray) -> None:
        """Test that a PLY cloud reads back."""
        path = save_points(tmp_path / "cloud.ply", cloud)
        np.testing.assert_array_equal(load_points(path), cloud)

    def test_xyz_comments_and_blank_lines(self, tmp_path: Path) -> None:
        """Test that comments and blank lines are skipped."""
        path = tmp_path / "pts.xyz"
        path.write_text("# header\n0 0\n\n1 0  # right\n0 1\n", encoding="utf-8")
        assert read_xyz(path).shape == (3, 2)

    def test_off_vertices(self, tmp_path: Path) -> None:
        """Test that an OFF file can serve as a point cloud."""
        pts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        path = write_off(tmp_path / "tri.off", pts, [(0, 1, 2)])
        np.testing.assert_array_equal(load_points(path), pts)

    # -------------------------------------------------------------------------
    # Error Handling Tests
    # -------------------------------------------------------------------------

    def test_xyz_non_numeric(self, tmp_path: Path) -> None:
        """Test that a non-numeric field reports its line."""
        path = tmp_path / "bad.xyz"
        path.write_text("0 0 0\n1 x 0\n", encoding="utf-8")
        with pytest.raises(FormatError) as info:
            read_xyz(path)
        assert info.value.context["line"] == 2

    def test_xyz_ragged(self, tmp_path: Path) -> None:
        """Test that rows must have the same length."""
        path = tmp_path / "ragged.xyz"
        path.write_text("0 0 0\n1 0\n", encoding="utf-8")
        with pytest.raises(FormatError):
            read_xyz(path)

    def test_xyz_wrong_dimension(self, tmp_path: Path) -> None:
        """Test that 4D points are rejected."""
        path = tmp_path / "four.xyz"
        path.write_text("0 0 0 0\n", encoding="utf-8")
        with pytest.raises(FormatError):
            read_xyz(path)

    def test_empty_file(self, tmp_path: Path) -> None:
        """Test that a file without points is rejected."""
        path = tmp_path / "empty.xyz"
        path.write_text("# nothing\n", encoding="utf-8")
        with pytest.raises(FormatError):
            read_xyz(path)

    def test_binary_ply(self, tmp_path: Path) -> None:
        """Test that binary PLY is refused."""
        path = tmp_path / "bin.ply"
        path.write_text(
            "ply\nformat binary_little_endian 1.0\nelement vertex 0\nend_header\n", encoding="utf-8"
        )
        with pytest.raises(FormatError):
            read_ply(path)

    def test_unknown_suffix(self, tmp_path: Path) -> None:
        """Test that unknown suffixes are rejected."""
        path = tmp_path / "cloud.csv"
        path.write_text("0,0\n", encoding="utf-8")
        with pytest.raises(FormatError):
            load_points(path)


class TestMeshFiles:
    """Test suite for mesh files."""

    def test_off_mesh(self, tmp_path: Path, octahedron: SimplicialComplex) -> None:
        """Test that an OFF mesh closes back to the same complex."""
        path = save_complex(tmp_path / "octa.off", octahedron)
        assert load_complex(path) == octahedron

    def test_ply_mesh(self, tmp_path: Path, octahedron: SimplicialComplex) -> None:
        """Test that a PLY mesh closes back to the same complex."""
        path = save_complex(tmp_path / "octa.ply", octahedron)
        assert load_complex(path).as_set() == octahedron.as_set()

    def test_planar_off(self, tmp_path: Path, polygon: SimplicialComplex) -> None:
        """Test that planar meshes are stored with z = 0 and read back in 2D."""
        path = save_complex(tmp_path / "poly.off", polygon)
        pts, faces = read_off(path)
        assert pts.shape == (12, 3)
        assert np.all(pts[:, 2] == 0.0)
        assert len(faces) == 12
        assert load_complex(path, polygon.points) == polygon

    def test_edge_list(self, tmp_path: Path, polygon: SimplicialComplex) -> None:
        """Test that an edge list needs the point table and reproduces the curve."""
        path = save_complex(tmp_path / "poly.edges", polygon)
        assert load_complex(path, polygon.points).as_set() == polygon.as_set()
        with pytest.raises(FormatError):
            load_complex(path)

    def test_off_count_mismatch(self, tmp_path: Path) -> None:
        """Test that an OFF file shorter than its header claims is rejected."""
        path = tmp_path / "short.off"
        path.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n", encoding="utf-8")
        with pytest.raises(FormatError):
            read_off(path)

    def test_face_out_of_range(self, tmp_path: Path) -> None:
        """Test that a face referencing a missing vertex is a format error."""
        path = tmp_path / "dangling.off"
        path.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n", encoding="utf-8")
        with pytest.raises(FormatError):
            load_complex(path)

    def test_crossing_faces(self, tmp_path: Path) -> None:
        """Test that a mesh whose two triangles pierce each other is a format error."""
        path = tmp_path / "crossing.off"
        path.write_text(
            "OFF\n6 2 0\n0 0 0\n2 0 0\n0 2 0\n0.5 0.5 -1\n0.5 0.5 1\n3 3 0\n3 0 1 2\n3 3 4 5\n",
            encoding="utf-8",
        )
        with pytest.raises(FormatError, match="crosses"):
            load_complex(path)


class TestRunConfig:
    """Test suite for RunConfig."""

    # -------------------------------------------------------------------------
    # Happy Path Tests
    # -------------------------------------------------------------------------

    def test_ratios_resolve_against_reach(self) -> None:
        """Test that ratio lengths become absolute using the surface's reach."""
        config = RunConfig(command="reconstruct", surface="sphere r=2", alpha_ratio=0.359, epsilon_ratio=0.1)
        assert config.reach == 2.0
        assert config.alpha == pytest.approx(0.718)
        assert config.epsilon == pytest.approx(0.2)

    def test_consistent_absolute_and_ratio(self) -> None:
        """Test that agreeing absolute and ratio values are accepted."""
        config = RunConfig(command="sample", surface="sphere r=1", epsilon=0.2, epsilon_ratio=0.2)
        assert config.epsilon == 0.2

    def test_defaults(self) -> None:
        """Test the default mode, seed and grid."""
        config = RunConfig(command="region")
        assert config.mode is Mode.NAIVE
        assert config.seed == 0
        assert config.grid == 400
        assert config.manifold() is None

    # -------------------------------------------------------------------------
    # Error Handling Tests
    # -------------------------------------------------------------------------

    def test_ratio_without_surface(self) -> None:
        """Test that ratios need a surface."""
        with pytest.raises(ValidationError):
            RunConfig(command="reconstruct", alpha_ratio=0.3)

    def test_ratio_on_plane(self) -> None:
        """Test that a plane has no reach to scale ratios by."""
        with pytest.raises(ValidationError):
            RunConfig(command="reconstruct", surface="plane n=0,0,1 p=0,0,0", alpha_ratio=0.3)

    def test_conflicting_lengths(self) -> None:
        """Test that disagreeing absolute and ratio values are rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command="sample", surface="sphere r=1", epsilon=0.3, epsilon_ratio=0.2)

    def test_unknown_field(self) -> None:
        """Test that unknown fields are rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command="region", colour="blue")

    def test_negative_epsilon(self) -> None:
        """Test that lengths are validated."""
        with pytest.raises(ValidationError):
            RunConfig(command="sample", surface="sphere r=1", epsilon=-0.1)


class TestRunReport:
    """Test suite for the JSON run report."""

    def test_write_and_read(self, tmp_path: Path) -> None:
        """Test that a report validates against its own model after writing."""
        report = RunReport(config=RunConfig(command="region", grid=3), seed=0, timing={"region": 0.1})
        path = write_report(report, tmp_path / "report.json")
        loaded = read_report(path)
        assert loaded.config.grid == 3
        assert loaded.schema_version == REPORT_SCHEMA_VERSION

    def test_schema(self) -> None:
        """Test that the schema is tagged with its version."""
        schema = report_schema()
        assert schema["version"] == REPORT_SCHEMA_VERSION
        assert "config" in schema["properties"]

    def test_json_is_sorted(self) -> None:
        """Test that report JSON is stable."""
        text = report_json(RunReport(config=RunConfig(command="region"), seed=5))
        assert text.endswith("\n")
        assert text.index('"config"') < text.index('"seed"')

    def test_rejects_unknown_fields(self, tmp_path: Path) -> None:
        """Test that a document with extra keys fails validation."""
        path = tmp_path / "bad.json"
        path.write_text('{"config": {"command": "region"}, "seed": 0, "surprise": 1}', encoding="utf-8")
        with pytest.raises(ValidationError):
            read_report(path)
