"""
Domain exceptions.

Every error derives from ``SquashError`` and keeps the values a caller needs
(offending simplex, measured quantity) as attributes next to the message.
"""

from typing import Any, Optional, Sequence


class SquashError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str, *, context: Optional[dict[str, Any]] = None):
        self.message = message
        self.context = dict(context or {})
        super().__init__(message)


class SimplexError(SquashError):
    """An error attached to a specific simplex (sorted vertex ids)."""

    def __init__(self, simplex: Sequence[int], message: str, **context: Any):
        self.simplex = tuple(sorted(int(v) for v in simplex))
        super().__init__(f"[{_fmt(self.simplex)}] {message}", context=context)


def _fmt(simplex: Sequence[int]) -> str:
    return "-".join(str(v) for v in simplex) or "()"


# Geometry -----------------------------------------------------------------


class DegenerateSimplex(SquashError):
    """Points are affinely dependent where independence is required."""


class ZeroDimFlat(SquashError):
    """An angle was requested from a zero-dimensional flat."""


# Manifolds ------------------------------------------------------------------


class NearMedialAxis(SquashError):
    """A point is too far from the manifold for its projection to be unique."""

    def __init__(self, distance: float, reach: float, message: Optional[str] = None):
        self.distance = distance
        self.reach = reach
        super().__init__(
            message or f"distance {distance:.6g} to manifold is not below reach {reach:.6g}",
            context={"distance": distance, "reach": reach},
        )


class NotOnManifold(SquashError):
    """A point that must lie on the manifold is off it by more than the tolerance."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"point is {residual:.3g} away from the manifold", context={"residual": residual})


class SurfaceParseError(SquashError):
    """A surface description could not be parsed."""


# Sampling -------------------------------------------------------------------


class InfeasibleSpec(SquashError):
    """A sampling request cannot be met within the configured budget."""


# Triangulation --------------------------------------------------------------


class TooFewPoints(SquashError):
    """Fewer than d+1 points were given to the triangulation."""


class AllCoplanar(SquashError):
    """All input points lie in a common hyperplane."""


# Complexes ------------------------------------------------------------------


class SimplexNotFound(SimplexError):
    """The simplex is not part of the complex."""

    def __init__(self, simplex: Sequence[int]):
        super().__init__(simplex, "simplex not in complex")


class FlatSimplex(SimplexError, DegenerateSimplex):
    """A simplex of a complex spans a flat of lower dimension than its own."""

    def __init__(self, simplex: Sequence[int], rank: int):
        self.rank = rank
        super().__init__(simplex, f"vertices span only a {rank}-flat", rank=rank)


class NotEmbedded(SimplexError):
    """Two simplices meet outside the support of their shared face."""

    def __init__(self, simplex: Sequence[int], other: Sequence[int]):
        self.other = tuple(sorted(int(v) for v in other))
        super().__init__(simplex, f"support crosses simplex [{_fmt(self.other)}]", other=self.other)


class NotFree(SimplexError):
    """A collapse was requested on a simplex that is not free."""

    def __init__(self, simplex: Sequence[int]):
        super().__init__(simplex, "simplex is not free")


# Vertical machinery ---------------------------------------------------------


class OutsideTube(SimplexError):
    """A simplex leaves the tubular neighbourhood where projection is defined."""


class VerticalFacet(SimplexError):
    """A facet's normal is orthogonal to the manifold normal."""


class NotVerticallyConvex(SquashError):
    """Vertical convexity verification found a split normal segment."""

    def __init__(self, violations: int, message: Optional[str] = None):
        self.violations = violations
        super().__init__(
            message or f"{violations} witness segments meet the set in two or more pieces",
            context={"violations": violations},
        )


# Squash drivers -------------------------------------------------------------


class GenericityViolated(SimplexError):
    """A Voronoi vertex lies on the manifold within the genericity band."""

    def __init__(self, simplex: Sequence[int], height: float):
        self.height = height
        super().__init__(simplex, f"circumcenter height {height:.3g} is within the genericity band")


class Stuck(SquashError):
    """Neither non-crossing branch applies while the dual graph is non-empty."""

    def __init__(self, remaining: int, dot: str = ""):
        self.remaining = remaining
        self.dot = dot
        super().__init__(
            f"non-crossing squash stuck with {remaining} d-simplices left",
            context={"remaining": remaining},
        )


# Conditions -----------------------------------------------------------------


class ImaginaryBeta(SquashError):
    """The radicand in the beta formula is negative."""

    def __init__(self, radicand: float):
        self.radicand = radicand
        super().__init__(f"beta radicand is negative ({radicand:.6g})", context={"radicand": radicand})


class BoundExceedsOne(SquashError):
    """An arcsin argument exceeds one: the simplex is too large for the reach."""

    def __init__(self, value: float, what: str = "bound"):
        self.value = value
        super().__init__(f"{what} argument {value:.6g} exceeds 1", context={"value": value})


# IO -------------------------------------------------------------------------


class FormatError(SquashError):
    """An input file does not follow its declared format."""

    def __init__(self, path: str, message: str, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}", context={"path": path, "line": line})


class CacheError(SquashError):
    """A triangulation cache is stale, corrupt or from another format version."""
