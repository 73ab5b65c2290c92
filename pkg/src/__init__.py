"""
vertical-squash

Surface reconstruction from point samples by vertical collapses of the
alpha-complex, with verification of the sampling conditions that make the
result a triangulation of the sampled manifold.
"""

__version__ = "0.1.0"
