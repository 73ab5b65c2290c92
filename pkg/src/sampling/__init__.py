"""Sample generation and (epsilon, delta) certification."""

from src.sampling.sampler import (
    PointCloud,
    SampleReport,
    SampleSpec,
    estimate_sampling,
    measure_covering,
    median_spacing,
    sample_manifold,
    verify_sample,
)

__all__ = [
    "PointCloud",
    "SampleReport",
    "SampleSpec",
    "estimate_sampling",
    "measure_covering",
    "median_spacing",
    "sample_manifold",
    "verify_sample",
]
