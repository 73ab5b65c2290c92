"""Squash drivers, their traces and post-hoc verification."""

from src.squash.drivers import (
    SquashResult,
    default_verifier,
    naive_squash,
    naive_vertical_simplification,
    non_crossing_squash,
    practical_squash,
    practical_vertical_simplification,
    sampling_params,
)
from src.squash.trace import CollapseStep, SquashTrace, TerminalState, TraceSummary
from src.squash.verification import DualGraphCheck, VerificationReport, duality_holds, verify_run

__all__ = [
    "CollapseStep",
    "DualGraphCheck",
    "SquashResult",
    "SquashTrace",
    "TerminalState",
    "TraceSummary",
    "VerificationReport",
    "default_verifier",
    "duality_holds",
    "naive_squash",
    "naive_vertical_simplification",
    "non_crossing_squash",
    "practical_squash",
    "practical_vertical_simplification",
    "sampling_params",
    "verify_run",
]
