"""
Orientation and in-sphere predicates for d = 2 and d = 3.

Each predicate first evaluates its determinant in double precision and
compares it against a static forward error bound (the stage-A bounds of
Shewchuk's adaptive predicates). Only when the float result cannot be
trusted is the sign recomputed exactly with ``fractions.Fraction``. Inputs
stay doubles; only the returned sign is exact.

``in_sphere_sos`` breaks exact cospherical ties with a symbolic perturbation
of the lifting map, keyed by the global point index (smaller index means a
larger perturbation). It never returns 0 for a non-degenerate cell.
"""

import sys
from fractions import Fraction
from typing import Sequence

from src.errors import DegenerateSimplex

Coords = Sequence[float]

_EPS = sys.float_info.epsilon * 0.5

CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
O3D_ERRBOUND = (7.0 + 56.0 * _EPS) * _EPS
ICC_ERRBOUND = (10.0 + 96.0 * _EPS) * _EPS
ISP_ERRBOUND = (16.0 + 224.0 * _EPS) * _EPS

# The lifted 3D determinant is expanded in a different order than the
# reference one; doubling the bound keeps it on the safe side.
_ISP_SAFETY = 2.0


def _sign(x: float | Fraction) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# Exact fallbacks
# ---------------------------------------------------------------------------


def _exact_det(rows: list[list[Fraction]]) -> Fraction:
    """Determinant by fraction-free Gaussian elimination."""
    m = [row[:] for row in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        p = m[col][col]
        det *= p
        for r in range(col + 1, n):
            f = m[r][col] / p
            if f:
                row_r, row_c = m[r], m[col]
                for c in range(col, n):
                    row_r[c] -= f * row_c[c]
    return det


def _exact_orient(points: Sequence[Coords]) -> int:
    base = [Fraction(c) for c in points[0]]
    rows = [[Fraction(c) - b for c, b in zip(p, base)] for p in points[1:]]
    return _sign(_exact_det(rows))


def _exact_lifted(points: Sequence[Coords], query: Coords) -> int:
    q = [Fraction(c) for c in query]
    rows = []
    for p in points:
        r = [Fraction(c) - qc for c, qc in zip(p, q)]
        rows.append(r + [sum(x * x for x in r)])
    return _sign(_exact_det(rows))


# ---------------------------------------------------------------------------
# Orientation
# ---------------------------------------------------------------------------


def orient2d(a: Coords, b: Coords, c: Coords) -> int:
    """Sign of det[b - a, c - a]."""
    acx, acy = a[0] - c[0], a[1] - c[1]
    bcx, bcy = b[0] - c[0], b[1] - c[1]
    left = acx * bcy
    right = acy * bcx
    det = left - right
    errbound = CCW_ERRBOUND * (abs(left) + abs(right))
    if det > errbound or -det > errbound:
        return _sign(det)
    return _exact_orient([a, b, c])


def orient3d(a: Coords, b: Coords, c: Coords, d: Coords) -> int:
    """Sign of det[b - a, c - a, d - a]."""
    ux, uy, uz = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    vx, vy, vz = c[0] - a[0], c[1] - a[1], c[2] - a[2]
    wx, wy, wz = d[0] - a[0], d[1] - a[1], d[2] - a[2]

    vywz, vzwy = vy * wz, vz * wy
    vxwz, vzwx = vx * wz, vz * wx
    vxwy, vywx = vx * wy, vy * wx

    det = ux * (vywz - vzwy) - uy * (vxwz - vzwx) + uz * (vxwy - vywx)
    permanent = (
        abs(ux) * (abs(vywz) + abs(vzwy))
        + abs(uy) * (abs(vxwz) + abs(vzwx))
        + abs(uz) * (abs(vxwy) + abs(vywx))
    )
    errbound = O3D_ERRBOUND * permanent
    if det > errbound or -det > errbound:
        return _sign(det)
    return _exact_orient([a, b, c, d])


def orient(points: Sequence[Coords]) -> int:
    """
    Orientation of d+1 points in R^d.

    Returns the sign of the determinant of the edge vectors ``p_i - p_0``:
    +1 for a positively oriented simplex, 0 iff the points are affinely
    dependent.
    """
    n = len(points)
    if n == 3:
        return orient2d(points[0], points[1], points[2])
    if n == 4:
        return orient3d(points[0], points[1], points[2], points[3])
    raise ValueError(f"orient expects 3 or 4 points, got {n}")


# ---------------------------------------------------------------------------
# In-sphere
# ---------------------------------------------------------------------------


def _lifted2d(a: Coords, b: Coords, c: Coords, q: Coords) -> int:
    adx, ady = a[0] - q[0], a[1] - q[1]
    bdx, bdy = b[0] - q[0], b[1] - q[1]
    cdx, cdy = c[0] - q[0], c[1] - q[1]

    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    alift = adx * adx + ady * ady
    cdxady, adxcdy = cdx * ady, adx * cdy
    blift = bdx * bdx + bdy * bdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    clift = cdx * cdx + cdy * cdy

    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = (
        (abs(bdxcdy) + abs(cdxbdy)) * alift
        + (abs(cdxady) + abs(adxcdy)) * blift
        + (abs(adxbdy) + abs(bdxady)) * clift
    )
    errbound = ICC_ERRBOUND * permanent
    if det > errbound or -det > errbound:
        return _sign(det)
    return _exact_lifted([a, b, c], q)


def _det3(r0: Coords, r1: Coords, r2: Coords) -> tuple[float, float]:
    """3x3 determinant and its permanent (absolute-value expansion)."""
    m0 = r1[1] * r2[2] - r1[2] * r2[1]
    m1 = r1[0] * r2[2] - r1[2] * r2[0]
    m2 = r1[0] * r2[1] - r1[1] * r2[0]
    p0 = abs(r1[1] * r2[2]) + abs(r1[2] * r2[1])
    p1 = abs(r1[0] * r2[2]) + abs(r1[2] * r2[0])
    p2 = abs(r1[0] * r2[1]) + abs(r1[1] * r2[0])
    det = r0[0] * m0 - r0[1] * m1 + r0[2] * m2
    perm = abs(r0[0]) * p0 + abs(r0[1]) * p1 + abs(r0[2]) * p2
    return det, perm


def _lifted3d(a: Coords, b: Coords, c: Coords, d: Coords, q: Coords) -> int:
    rows = [
        (p[0] - q[0], p[1] - q[1], p[2] - q[2])
        for p in (a, b, c, d)
    ]
    lifts = [r[0] * r[0] + r[1] * r[1] + r[2] * r[2] for r in rows]
    # expansion along the lift column (column 3 of a 4x4 matrix)
    det = 0.0
    permanent = 0.0
    for i in range(4):
        others = [rows[j] for j in range(4) if j != i]
        minor, perm = _det3(*others)
        sign = -1.0 if i % 2 == 0 else 1.0
        det += sign * lifts[i] * minor
        permanent += lifts[i] * perm
    errbound = _ISP_SAFETY * ISP_ERRBOUND * permanent
    if det > errbound or -det > errbound:
        return _sign(det)
    return _exact_lifted([a, b, c, d], q)


def _lifted(points: Sequence[Coords], query: Coords) -> int:
    if len(points) == 3:
        return _lifted2d(points[0], points[1], points[2], query)
    return _lifted3d(points[0], points[1], points[2], points[3], query)


def in_sphere(simplex_points: Sequence[Coords], query: Coords) -> int:
    """
    Position of ``query`` relative to the circumsphere of d+1 points.

    Returns +1 strictly inside, -1 strictly outside, 0 on the sphere.

    Raises:
        DegenerateSimplex: If the simplex points are affinely dependent.
    """
    o = orient(simplex_points)
    if o == 0:
        raise DegenerateSimplex("in_sphere on an affinely dependent simplex")
    d = len(simplex_points) - 1
    # det[[x, 1]] = (-1)^d * det(edges); the lifted determinant is translated to the query
    return _lifted(simplex_points, query) * o * (1 if d % 2 == 0 else -1)


def in_sphere_sos(
    simplex_points: Sequence[Coords],
    simplex_ids: Sequence[int],
    query: Coords,
    query_id: int,
) -> int:
    """
    ``in_sphere`` with simulated-simplicity tie breaking.

    The lift ``|x|^2`` of point ``i`` is perturbed by an infinitesimal that
    strictly dominates the perturbations of every point with a larger index.
    The first cofactor (in index order) that does not vanish decides the sign.
    """
    raw = in_sphere(simplex_points, query)
    if raw != 0:
        return raw

    d = len(simplex_points) - 1
    rows = list(simplex_points) + [query]
    ids = list(simplex_ids) + [query_id]
    cell_orient = orient(simplex_points)
    for row in sorted(range(d + 2), key=lambda r: ids[r]):
        if row == d + 1:
            # query dominates: perturbed query lift is larger, so it is outside
            return -1
        minor = orient(rows[:row] + rows[row + 1:])
        if minor != 0:
            parity = 1 if (row + d) % 2 == 0 else -1
            return parity * minor * cell_orient
    # unreachable for a non-degenerate cell: the query row minor is the cell itself
    return -1
