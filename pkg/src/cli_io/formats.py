"""
Point cloud and mesh files.

Supported: XYZ (one point per line, plain decimals), PLY ascii 1.0 (vertex
and optional face elements), OFF, and a plain edge list for curves. Meshes
are written as the maximal simplices of a complex, so reading a file back
and closing it under faces gives the same simplex set.
"""

import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike

from src.errors import DegenerateSimplex, FormatError, NotEmbedded
from src.geometry.primitives import FloatArray, as_points
from src.topology.complex import SimplicialComplex

logger = logging.getLogger(__name__)

Face = tuple[int, ...]

POINT_SUFFIXES = (".xyz", ".ply", ".off")
MESH_SUFFIXES = (".off", ".ply", ".edges")


def _fmt(x: float) -> str:
    return repr(float(x))


def _data_lines(path: Path) -> list[tuple[int, str]]:
    """Non-blank lines without ``#`` comments, with 1-based line numbers."""
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise FormatError(str(path), f"not a text file ({e})")
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((no, line))
    return out


def _floats(path: Path, no: int, fields: Sequence[str]) -> list[float]:
    try:
        return [float(f) for f in fields]
    except ValueError:
        raise FormatError(str(path), f"expected numbers, got {' '.join(fields)!r}", no)


def _ints(path: Path, no: int, fields: Sequence[str]) -> list[int]:
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise FormatError(str(path), f"expected integers, got {' '.join(fields)!r}", no)


# ----------------------------------------------------------------------
# XYZ
# ----------------------------------------------------------------------


def write_xyz(path: str | Path, points: ArrayLike) -> Path:
    path = Path(path)
    pts = as_points(points)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(" ".join(_fmt(x) for x in p) + "\n" for p in pts), encoding="utf-8")
    logger.info("Wrote %d points to %s", pts.shape[0], path)
    return path


def read_xyz(path: str | Path) -> FloatArray:
    """
    Read an XYZ file.

    Raises:
        FormatError: On non-numeric fields, ragged rows or an unsupported dimension.
    """
    path = Path(path)
    rows: list[list[float]] = []
    for no, line in _data_lines(path):
        row = _floats(path, no, line.split())
        if rows and len(row) != len(rows[0]):
            raise FormatError(str(path), f"expected {len(rows[0])} coordinates, got {len(row)}", no)
        rows.append(row)
    if not rows:
        raise FormatError(str(path), "no points")
    if len(rows[0]) not in (2, 3):
        raise FormatError(str(path), f"points must have 2 or 3 coordinates, got {len(rows[0])}")
    return np.asarray(rows, dtype=np.float64)


# ----------------------------------------------------------------------
# PLY (ascii 1.0)
# ----------------------------------------------------------------------


def write_ply(path: str | Path, points: ArrayLike, faces: Optional[Sequence[Face]] = None) -> Path:
    path = Path(path)
    pts = as_points(points)
    faces = list(faces or [])
    axes = "xyz"[: pts.shape[1]]
    header = ["ply", "format ascii 1.0", f"element vertex {pts.shape[0]}"]
    header += [f"property double {a}" for a in axes]
    if faces:
        header += [f"element face {len(faces)}", "property list uchar int vertex_indices"]
    header.append("end_header")
    body = [" ".join(_fmt(x) for x in p) for p in pts]
    body += [" ".join(str(v) for v in (len(f), *f)) for f in faces]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(header + body) + "\n", encoding="utf-8")
    logger.info("Wrote PLY with %d vertices and %d faces to %s", pts.shape[0], len(faces), path)
    return path


def read_ply(path: str | Path) -> tuple[FloatArray, list[Face]]:
    """
    Read an ascii PLY file with a vertex element and an optional face element.

    Raises:
        FormatError: On a binary or malformed file.
    """
    path = Path(path)
    lines = _data_lines(path)
    if not lines or lines[0][1] != "ply":
        raise FormatError(str(path), "missing 'ply' magic line", lines[0][0] if lines else None)
    elements: list[tuple[str, int, list[str]]] = []
    i = 1
    while i < len(lines) and lines[i][1] != "end_header":
        no, line = lines[i]
        parts = line.split()
        if parts[0] == "format" and parts[1:2] != ["ascii"]:
            raise FormatError(str(path), f"only ascii PLY is supported, got {line!r}", no)
        if parts[0] == "element":
            elements.append((parts[1], _ints(path, no, parts[2:3])[0], []))
        elif parts[0] == "property":
            if not elements:
                raise FormatError(str(path), "property before any element", no)
            elements[-1][2].append(parts[-1])
        i += 1
    if i == len(lines):
        raise FormatError(str(path), "missing end_header")

    body = lines[i + 1:]
    points: list[list[float]] = []
    faces: list[Face] = []
    pos = 0
    for name, count, props in elements:
        chunk = body[pos:pos + count]
        if len(chunk) != count:
            raise FormatError(str(path), f"expected {count} {name} rows, found {len(chunk)}")
        for no, line in chunk:
            fields = line.split()
            if name == "vertex":
                coords = [p for p in props if p in ("x", "y", "z")]
                points.append(_floats(path, no, fields[: len(coords)]))
            elif name == "face":
                values = _ints(path, no, fields)
                if values[0] != len(values) - 1:
                    raise FormatError(str(path), "face list length does not match its count", no)
                faces.append(tuple(values[1:]))
        pos += count
    if not points:
        raise FormatError(str(path), "no vertices")
    return np.asarray(points, dtype=np.float64), faces


# ----------------------------------------------------------------------
# OFF
# ----------------------------------------------------------------------


def write_off(path: str | Path, points: ArrayLike, faces: Sequence[Face]) -> Path:
    """OFF is 3D only; planar points get z = 0."""
    path = Path(path)
    pts = as_points(points)
    if pts.shape[1] == 2:
        pts = np.hstack([pts, np.zeros((pts.shape[0], 1))])
    lines = ["OFF", f"{pts.shape[0]} {len(faces)} 0"]
    lines += [" ".join(_fmt(x) for x in p) for p in pts]
    lines += [" ".join(str(v) for v in (len(f), *f)) for f in faces]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("Wrote OFF with %d vertices and %d faces to %s", pts.shape[0], len(faces), path)
    return path


def read_off(path: str | Path, dim: Optional[int] = None) -> tuple[FloatArray, list[Face]]:
    """
    Read an OFF file.

    Args:
        path: File to read
        dim: Drop the z column when 2 (it must then be zero)

    Raises:
        FormatError: On a malformed header, count mismatch or non-zero z for ``dim=2``.
    """
    path = Path(path)
    lines = _data_lines(path)
    if not lines or not lines[0][1].startswith("OFF"):
        raise FormatError(str(path), "missing OFF header", lines[0][0] if lines else None)
    rest = lines[0][1][3:].split()
    start = 1
    if not rest:
        if len(lines) < 2:
            raise FormatError(str(path), "missing counts line")
        rest = lines[1][1].split()
        start = 2
    counts = _ints(path, lines[start - 1][0], rest[:3])
    n_vertices, n_faces = counts[0], counts[1]
    if len(lines) - start < n_vertices + n_faces:
        raise FormatError(str(path), f"expected {n_vertices} vertices and {n_faces} faces")
    points = [_floats(path, no, line.split()[:3]) for no, line in lines[start:start + n_vertices]]
    faces: list[Face] = []
    for no, line in lines[start + n_vertices:start + n_vertices + n_faces]:
        values = _ints(path, no, line.split())
        k = values[0]
        if len(values) < k + 1:
            raise FormatError(str(path), f"face declares {k} vertices, got {len(values) - 1}", no)
        faces.append(tuple(values[1:k + 1]))
    pts = np.asarray(points, dtype=np.float64)
    if dim == 2:
        if np.any(pts[:, 2] != 0.0):
            raise FormatError(str(path), "non-zero z coordinate in a planar mesh")
        pts = pts[:, :2]
    return pts, faces


# ----------------------------------------------------------------------
# Edge lists
# ----------------------------------------------------------------------


def write_edges(path: str | Path, simplices: Sequence[Face]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(" ".join(str(v) for v in s) + "\n" for s in simplices), encoding="utf-8")
    return path


def read_edges(path: str | Path) -> list[Face]:
    path = Path(path)
    return [tuple(_ints(path, no, line.split())) for no, line in _data_lines(path)]


def write_text(path: str | Path, text: str) -> Path:
    """Plain text artifacts such as DOT dumps."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


# ----------------------------------------------------------------------
# Dispatch by suffix
# ----------------------------------------------------------------------


def load_points(path: str | Path) -> FloatArray:
    """
    Read a cloud from XYZ, PLY or OFF (vertices only).

    Raises:
        FormatError: On an unknown suffix or a malformed file.
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".xyz":
        return read_xyz(path)
    if suffix == ".ply":
        return read_ply(path)[0]
    if suffix == ".off":
        return read_off(path)[0]
    raise FormatError(str(path), f"unknown point cloud suffix {suffix!r}; expected one of {POINT_SUFFIXES}")


def save_points(path: str | Path, points: ArrayLike) -> Path:
    path = Path(path)
    if path.suffix.lower() == ".ply":
        return write_ply(path, points)
    if path.suffix.lower() == ".xyz":
        return write_xyz(path, points)
    raise FormatError(str(path), "point clouds are written as .xyz or .ply")


def mesh_faces(K: SimplicialComplex) -> list[Face]:
    """Maximal simplices in (dimension, vertex ids) order."""
    return sorted(K.maximal_simplices(), key=lambda s: (len(s), s))


def save_complex(path: str | Path, K: SimplicialComplex) -> Path:
    """Write ``K`` as OFF, PLY or an edge list, chosen by suffix."""
    path = Path(path)
    faces = mesh_faces(K)
    suffix = path.suffix.lower()
    if suffix == ".off":
        return write_off(path, K.points, faces)
    if suffix == ".ply":
        return write_ply(path, K.points, faces)
    if suffix == ".edges":
        return write_edges(path, faces)
    raise FormatError(str(path), f"unknown mesh suffix {suffix!r}; expected one of {MESH_SUFFIXES}")


def load_complex(path: str | Path, points: Optional[ArrayLike] = None) -> SimplicialComplex:
    """
    Read a complex written by ``save_complex``.

    Edge lists carry no coordinates, so ``points`` is required for them. For
    OFF files ``points`` fixes the dimension (planar meshes are stored with
    z = 0).

    Raises:
        FormatError: On a malformed file, a face that references a missing vertex, a
            flat face or two faces that cross.
    """
    path = Path(path)
    suffix = path.suffix.lower()
    dim = None if points is None else as_points(points).shape[1]
    if suffix == ".off":
        pts, faces = read_off(path, dim=dim)
    elif suffix == ".ply":
        pts, faces = read_ply(path)
    elif suffix == ".edges":
        if points is None:
            raise FormatError(str(path), "edge lists need a point table")
        pts, faces = as_points(points), read_edges(path)
    else:
        raise FormatError(str(path), f"unknown mesh suffix {suffix!r}; expected one of {MESH_SUFFIXES}")
    try:
        return SimplicialComplex.from_simplices(pts, faces)
    except (ValueError, DegenerateSimplex, NotEmbedded) as e:
        raise FormatError(str(path), str(e))
