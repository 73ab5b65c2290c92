"""
Versioned on-disk cache for alpha complexes.

The ``.npz`` container stores the point table, the Delaunay cells and
adjacency, and the filtration arrays, together with a format version and a
SHA-256 of the points so a cache is never applied to a different cloud. A
plain-text listing can be written alongside for inspection.
"""

import hashlib
import logging
from pathlib import Path
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from src.errors import CacheError
from src.geometry.primitives import as_points
from src.triangulation.alpha import AlphaComplex
from src.triangulation.delaunay import DelaunayComplex

logger = logging.getLogger(__name__)

CACHE_FORMAT_VERSION = 1


def points_digest(points: ArrayLike) -> str:
    arr = np.ascontiguousarray(as_points(points), dtype="<f8")
    h = hashlib.sha256()
    h.update(str(arr.shape).encode())
    h.update(arr.tobytes())
    return h.hexdigest()


def save_alpha_cache(path: str | Path, complex_: AlphaComplex, listing: bool = False) -> Path:
    """Write ``complex_`` to ``path`` (``.npz``); optionally a ``.txt`` listing next to it."""
    path = Path(path)
    dt = complex_.delaunay
    arrays = {
        "format_version": np.array(CACHE_FORMAT_VERSION),
        "digest": np.array(points_digest(dt.points)),
        "points": dt.points,
        "cells": dt.cells,
        "neighbors": dt.neighbors,
    }
    for k, (rows, values) in enumerate(zip(complex_.simplices, complex_.alpha2)):
        arrays[f"simplices_{k}"] = rows
        arrays[f"alpha2_{k}"] = values
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        np.savez_compressed(fh, **arrays)
    if listing:
        path.with_suffix(".txt").write_text("\n".join(complex_.listing()) + "\n", encoding="utf-8")
    logger.info("Saved alpha complex cache to %s", path)
    return path


def load_alpha_cache(path: str | Path, points: Optional[ArrayLike] = None) -> AlphaComplex:
    """
    Read a cache written by ``save_alpha_cache``.

    Raises:
        CacheError: On unreadable files, version mismatch, or when ``points``
            is given and differs from the cached cloud.
    """
    path = Path(path)
    try:
        with np.load(path, allow_pickle=False) as data:
            arrays = {key: data[key] for key in data.files}
    except (OSError, ValueError) as e:
        raise CacheError(f"cannot read cache {path}: {e}")

    try:
        version = int(arrays["format_version"])
        digest = str(arrays["digest"])
        pts = arrays["points"]
        d = pts.shape[1]
        simplices = [arrays[f"simplices_{k}"] for k in range(d + 1)]
        alpha2 = [arrays[f"alpha2_{k}"] for k in range(d + 1)]
        cells, neighbors = arrays["cells"], arrays["neighbors"]
    except (KeyError, IndexError) as e:
        raise CacheError(f"cache {path} is missing field {e}")

    if version != CACHE_FORMAT_VERSION:
        raise CacheError(f"cache {path} has format version {version}, expected {CACHE_FORMAT_VERSION}")
    if digest != points_digest(pts):
        raise CacheError(f"cache {path} is corrupt: stored digest does not match its points")
    if points is not None and points_digest(points) != digest:
        raise CacheError(f"cache {path} was built for a different point cloud")

    dt = DelaunayComplex(points=pts, cells=cells, neighbors=neighbors)
    logger.info("Loaded alpha complex cache %s (%d cells)", path, cells.shape[0])
    return AlphaComplex(delaunay=dt, simplices=simplices, alpha2=alpha2)
