"""Brute-force empty-sphere oracle.

Every non-degenerate 4-subset defines a circumsphere; the spheres with no
input point strictly inside are the Delaunay spheres, and the points exactly
on such a sphere span one maximal co-spherical cell.  This is O(n^5) but
shares no code with the incremental construction: spheres are built
explicitly (Cramer's rule on the integer lattice form) and points are tested
by squared distance instead of an insphere determinant.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

import numpy as np

from .delaunay import CellComplex, CoSphericalCell, DelaunayError
from .exact import ZERO
from .kernels import ExactKernel, LatticeKernel, lattice_form
from .predicates import Point3, circumsphere, dot, orient3d


def _lattice_spheres(coords: np.ndarray, weights: np.ndarray):
    """On-sphere masks of all empty circumspheres, vectorized over 4-subsets."""
    n = len(coords)
    quads = np.array(list(combinations(range(n), 4)), dtype=np.int64)
    p0 = coords[quads[:, 0]]
    rel = coords[quads[:, 1:]] - p0[:, None, :]  # (m, 3, 3)
    a = 2 * weights[None, None, :] * rel
    rhs = (weights[None, None, :] * rel * rel).sum(axis=2)  # (m, 3)

    def det3(m):
        return (
            m[:, 0, 0] * (m[:, 1, 1] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 1])
            - m[:, 0, 1] * (m[:, 1, 0] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 0])
            + m[:, 0, 2] * (m[:, 1, 0] * m[:, 2, 1] - m[:, 1, 1] * m[:, 2, 0])
        )

    den = det3(a)
    ok = den != 0
    a, rhs, den, p0, quads = a[ok], rhs[ok], den[ok], p0[ok], quads[ok]
    num = np.empty((len(den), 3), dtype=np.int64)
    for k in range(3):
        ak = a.copy()
        ak[:, :, k] = rhs
        num[:, k] = det3(ak)
    # scaled by den: center offset from p0 is num / den
    r2 = (weights[None, :] * num * num).sum(axis=1)
    diff = den[:, None, None] * (coords[None, :, :] - p0[:, None, :]) - num[:, None, :]
    d2 = (weights[None, None, :] * diff * diff).sum(axis=2)  # (m, n)
    inside = (d2 < r2[:, None]).any(axis=1)
    on = d2 == r2[:, None]
    bits = (on[~inside] * (1 << np.arange(n, dtype=np.int64))[None, :]).sum(axis=1)
    first = {}
    for b, q in zip(bits.tolist(), quads[~inside].tolist()):
        first.setdefault(b, tuple(q))
    return first


def _exact_spheres(points: Sequence[Point3]):
    first = {}
    n = len(points)
    for q in combinations(range(n), 4):
        a, b, c, d = (points[i] for i in q)
        if orient3d(a, b, c, d) == 0:
            continue
        s = circumsphere(a, b, c, d)
        dist = []
        for p in points:
            r = p - s.center
            dist.append((dot(r, r) - s.radius2).sign())
        if min(dist) < 0:
            continue
        bits = sum(1 << i for i, v in enumerate(dist) if v == 0)
        first.setdefault(bits, q)
    return first


def _supporting_sets(kernel, verts):
    """Yield ``(on-plane set, a point strictly behind)`` for every hull face of ``verts``."""
    seen = set()
    vs = list(verts)
    for a, b, c in combinations(vs, 3):
        signs = [kernel.orient(a, b, c, q) for q in vs]
        if min(signs) < 0 < max(signs) or not any(signs):
            continue
        on = frozenset(q for q, s in zip(vs, signs) if s == 0)
        if on in seen:
            continue
        seen.add(on)
        yield on, next(q for q, s in zip(vs, signs) if s != 0)


def _order_face(kernel, on, behind) -> tuple:
    """Extreme points of the coplanar set ``on``, counter-clockwise from outside.

    Gift wrapping inside the plane: ``q`` is left of ``u -> v`` iff
    ``orient(u, v, q, behind) < 0``.  Points strictly inside a polygon edge
    (possible on the hull of the whole input, never on a co-spherical face)
    are dropped first so that the wrapping order stays transitive.
    """
    pts = sorted(on)
    pts = [
        s
        for s in pts
        if not any(
            kernel.orient(u, s, w, behind) == 0 and kernel.metric_dot(u, s, s, w) > 0
            for u in pts
            for w in pts
            if len({u, s, w}) == 3
        )
    ]
    # the lexicographically least point is extreme
    start = min(pts, key=kernel.point)
    cyc = [start]
    cur = start
    while True:
        nxt = None
        for q in pts:
            if q == cur:
                continue
            if nxt is None:
                nxt = q
                continue
            side = -kernel.orient(cur, nxt, q, behind)
            if side < 0:
                nxt = q
        if nxt == start:
            return tuple(cyc)
        cyc.append(nxt)
        cur = nxt
        if len(cyc) > len(pts):
            raise DelaunayError("face boundary did not close")


def _cell_faces(kernel, verts) -> tuple:
    faces = [_order_face(kernel, on, behind) for on, behind in _supporting_sets(kernel, verts)]
    return tuple(sorted(_rotate_min(f) for f in faces))


def _rotate_min(cyc: tuple) -> tuple:
    i = cyc.index(min(cyc))
    return cyc[i:] + cyc[:i]


def _hull_volume6(kernel, verts):
    total = ZERO
    apex = verts[0]
    for on, behind in _supporting_sets(kernel, verts):
        if apex in on:
            continue
        cyc = _order_face(kernel, on, behind)
        for i in range(1, len(cyc) - 1):
            total = total - kernel.volume6(cyc[0], cyc[i], cyc[i + 1], apex)
    return total


def brute_force_cells(points: Sequence[Point3]) -> CellComplex:
    points = list(points)
    n = len(points)
    if n < 4:
        raise DelaunayError("need at least four points")
    if len(set(points)) != n:
        raise DelaunayError("duplicate points")
    form = lattice_form(points)
    if form is not None:
        coords, weights, scale = form
        kernel = LatticeKernel(coords, weights, scale)
        spheres = _lattice_spheres(np.array(coords, dtype=np.int64), np.array(weights, dtype=np.int64))
    else:
        kernel = ExactKernel(points)
        spheres = _exact_spheres(points)
    if not spheres:
        raise DelaunayError("all points are coplanar")
    cells = []
    for bits, quad in spheres.items():
        verts = tuple(i for i in range(n) if bits >> i & 1)
        a, b, c, d = quad
        if kernel.orient(a, b, c, d) < 0:
            b, c = c, b
        cells.append(CoSphericalCell(verts, _cell_faces(kernel, verts), ((a, b, c, d),), kernel))
    cells.sort(key=lambda c: c.vertices)
    total = sum((c.volume6() for c in cells), ZERO)
    if total != _hull_volume6(kernel, tuple(range(n))):
        raise DelaunayError("empty-sphere cells do not partition the hull")
    return CellComplex(points, cells, kernel)
