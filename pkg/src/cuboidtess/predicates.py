"""Exact geometric predicates on points with Q(sqrt 2) coordinates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .exact import ZERO, ExactScalar, as_exact, sign


class DegenerateError(ValueError):
    """Raised when a predicate needs a non-degenerate simplex or polygon."""


class Point3(NamedTuple):
    x: ExactScalar
    y: ExactScalar
    z: ExactScalar

    @classmethod
    def of(cls, x, y, z) -> "Point3":
        return cls(as_exact(x), as_exact(y), as_exact(z))

    def __sub__(self, o):
        return Point3(self.x - o.x, self.y - o.y, self.z - o.z)

    def __add__(self, o):
        return Point3(self.x + o.x, self.y + o.y, self.z + o.z)

    def scale(self, s) -> "Point3":
        return Point3(self.x * s, self.y * s, self.z * s)


@dataclass(frozen=True)
class Sphere:
    center: Point3
    radius2: ExactScalar


def dot(u: Point3, v: Point3) -> ExactScalar:
    return u.x * v.x + u.y * v.y + u.z * v.z


def cross(u: Point3, v: Point3) -> Point3:
    return Point3(
        u.y * v.z - u.z * v.y,
        u.z * v.x - u.x * v.z,
        u.x * v.y - u.y * v.x,
    )


def _det3(u: Point3, v: Point3, w: Point3) -> ExactScalar:
    return dot(u, cross(v, w))


def tet_volume6(a: Point3, b: Point3, c: Point3, d: Point3) -> ExactScalar:
    """Signed six-fold volume, ``det(b - a, c - a, d - a)``."""
    return _det3(b - a, c - a, d - a)


def orient3d(a: Point3, b: Point3, c: Point3, d: Point3) -> int:
    return sign(tet_volume6(a, b, c, d))


def _det4(m) -> ExactScalar:
    # cofactor expansion along the last column
    total = ZERO
    for i in range(4):
        rows = [m[r] for r in range(4) if r != i]
        minor = _det3(
            Point3(rows[0][0], rows[1][0], rows[2][0]),
            Point3(rows[0][1], rows[1][1], rows[2][1]),
            Point3(rows[0][2], rows[1][2], rows[2][2]),
        )
        term = m[i][3] * minor
        total = total + term if (i + 3) % 2 == 0 else total - term
    return total


def insphere(a: Point3, b: Point3, c: Point3, d: Point3, e: Point3) -> int:
    """+1 if ``e`` is strictly inside the circumsphere of ``abcd``, 0 on it, -1 outside.

    The result does not depend on the orientation of ``abcd``.
    """
    o = orient3d(a, b, c, d)
    if o == 0:
        raise DegenerateError("insphere on a flat tetrahedron")
    rows = []
    for p in (a, b, c, d):
        q = p - e
        rows.append((q.x, q.y, q.z, dot(q, q)))
    # lifted determinant is negative for points inside a positive tet
    return -sign(_det4(rows)) * o


def circumsphere(a: Point3, b: Point3, c: Point3, d: Point3) -> Sphere:
    """Exact circumsphere by Cramer's rule on ``2 (p_i - a) . x = |p_i - a|^2``."""
    u, v, w = b - a, c - a, d - a
    den = _det3(u, v, w)
    if sign(den) == 0:
        raise DegenerateError("circumsphere of a flat tetrahedron")
    lu, lv, lw = dot(u, u), dot(v, v), dot(w, w)
    # x = (lu (v x w) + lv (w x u) + lw (u x v)) / (2 det)
    vw, wu, uv = cross(v, w), cross(w, u), cross(u, v)
    inv = ExactScalar(1, 0) / (den * 2)
    rel = Point3(
        (vw.x * lu + wu.x * lv + uv.x * lw) * inv,
        (vw.y * lu + wu.y * lv + uv.y * lw) * inv,
        (vw.z * lu + wu.z * lv + uv.z * lw) * inv,
    )
    return Sphere(rel + a, dot(rel, rel))


def is_rectangle(face: Sequence[Point3]) -> bool:
    """True iff the closed planar quadrilateral has four right angles."""
    if len(face) != 4 or len(set(face)) != 4:
        raise DegenerateError("a rectangle test needs four distinct points")
    p0, p1, p2, p3 = face
    if orient3d(p0, p1, p2, p3) != 0:
        raise DegenerateError("quadrilateral is not planar")
    n = cross(p1 - p0, p2 - p0)
    if sign(dot(n, n)) == 0:
        raise DegenerateError("quadrilateral has collinear corners")
    # simple iff every corner turns the same way as corner 1
    for i in range(4):
        turn = cross(face[(i + 1) % 4] - face[i], face[(i + 2) % 4] - face[(i + 1) % 4])
        if sign(dot(turn, n)) <= 0:
            raise DegenerateError("quadrilateral is not simple and convex")
    return all(
        sign(dot(face[(i + 1) % 4] - face[i], face[(i + 2) % 4] - face[(i + 1) % 4])) == 0
        for i in range(4)
    )
