"""
Parser for the one-line surface description format.

Accepted forms (keys may come in any order)::

    sphere r=1 [c=0,0,0]
    circle r=1 [c=0,0]
    torus R=3 r=1
    plane n=0,0,1 p=0,0,0 [w=1]
    implicit file=<path> [R=<reach>]
"""

import shlex

from src.errors import SurfaceParseError
from src.manifolds.analytic import (
    CircleManifold,
    HyperplaneManifold,
    SphereManifold,
    TorusManifold,
)
from src.manifolds.base import AnalyticManifold
from src.manifolds.implicit import ImplicitManifold

_ALLOWED = {
    "sphere": {"r", "c"},
    "circle": {"r", "c"},
    "torus": {"R", "r"},
    "plane": {"n", "p", "w"},
    "implicit": {"file", "R"},
}


def _number(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise SurfaceParseError(f"{key}={value!r} is not a number")


def _vector(key: str, value: str) -> list[float]:
    return [_number(key, part) for part in value.split(",")]


def parse_surface(text: str) -> AnalyticManifold:
    """
    Build a manifold from its text description.

    Raises:
        SurfaceParseError: On unknown kinds, unknown or missing keys, bad numbers.
    """
    try:
        tokens = shlex.split(text)
    except ValueError as e:
        raise SurfaceParseError(f"cannot tokenize surface {text!r}: {e}")
    if not tokens:
        raise SurfaceParseError("empty surface description")

    kind, fields = tokens[0].lower(), {}
    if kind not in _ALLOWED:
        raise SurfaceParseError(f"unknown surface kind {tokens[0]!r}")
    for token in tokens[1:]:
        key, sep, value = token.partition("=")
        if not sep or not value:
            raise SurfaceParseError(f"expected key=value, got {token!r}")
        if key not in _ALLOWED[kind]:
            raise SurfaceParseError(f"unknown key {key!r} for {kind}")
        fields[key] = value

    def need(key: str) -> str:
        if key not in fields:
            raise SurfaceParseError(f"{kind} requires {key}=")
        return fields[key]

    try:
        if kind == "sphere":
            center = _vector("c", fields.get("c", "0,0,0"))
            return SphereManifold(_number("r", need("r")), center)
        if kind == "circle":
            center = _vector("c", fields.get("c", "0,0"))
            return CircleManifold(_number("r", need("r")), center)
        if kind == "torus":
            return TorusManifold(_number("R", need("R")), _number("r", need("r")))
        if kind == "plane":
            normal = _vector("n", need("n"))
            base = _vector("p", fields.get("p", ",".join("0" * len(normal))))
            return HyperplaneManifold(normal, base, _number("w", fields.get("w", "1")))
        reach = _number("R", fields["R"]) if "R" in fields else None
        return ImplicitManifold.from_file(need("file"), reach=reach)
    except ValueError as e:
        raise SurfaceParseError(f"invalid {kind}: {e}")
