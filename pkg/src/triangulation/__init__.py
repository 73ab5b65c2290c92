"""Delaunay triangulation, alpha filtration and its on-disk cache."""

from src.triangulation.alpha import AlphaComplex, alpha_complex, alpha_values
from src.triangulation.cache import load_alpha_cache, save_alpha_cache
from src.triangulation.delaunay import INFINITE, DelaunayComplex, delaunay

__all__ = [
    "INFINITE",
    "AlphaComplex",
    "DelaunayComplex",
    "alpha_complex",
    "alpha_values",
    "delaunay",
    "load_alpha_cache",
    "save_alpha_cache",
]
