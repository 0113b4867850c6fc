"""Index-based predicate kernels used by the Delaunay code.

Every kernel owns a point list (input points followed by four far-away
bounding vertices) and answers sign queries on point indices.

:class:`LatticeKernel` is the fast path.  It applies whenever each axis'
coordinates are rational multiples of a common scale ``s`` with rational
``s**2`` (true for every cuboid studied here: edge lengths 1, 2, 4, sqrt 2 and
dyadic Steiner fractions).  Points become integer grid vectors ``X`` with
physical position ``diag(s) X``; distances use the integer diagonal metric
``diag(s**2)`` scaled to integers.  Orientation and insphere signs are then
integer determinants, multiplied by the positive factor ``s_x s_y s_z``.

:class:`ExactKernel` works directly on :class:`~cuboidtess.predicates.Point3`
values and covers anything else in Q(sqrt 2).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .exact import ONE, SQRT2, ExactScalar, sign
from .predicates import Point3, Sphere, circumsphere, dot, insphere, orient3d, tet_volume6


class LatticeKernel:
    """Integer grid points under an integer diagonal metric."""

    exact = False

    def __init__(self, coords, weights, scale, far=None):
        self.n = len(coords)
        self.weights = tuple(weights)
        self.scale = tuple(scale)  # physical = scale[k] * grid[k]
        extent = max((abs(v) for p in coords for v in p), default=1) + 1
        wmax = max(self.weights)
        if far is None:
            far = 1000 * extent * extent * wmax
        self.far = far
        m = far
        sup = [(-m, -m, -m), (5 * m, -m, -m), (-m, 5 * m, -m), (-m, -m, 5 * m)]
        self.coords = [tuple(p) for p in coords] + sup
        self.xs = [p[0] for p in self.coords]
        self.ys = [p[1] for p in self.coords]
        self.zs = [p[2] for p in self.coords]

    def with_far(self, far) -> "LatticeKernel":
        return LatticeKernel(self.coords[: self.n], self.weights, self.scale, far)

    def orient(self, a, b, c, d) -> int:
        xs, ys, zs = self.xs, self.ys, self.zs
        ux, uy, uz = xs[b] - xs[a], ys[b] - ys[a], zs[b] - zs[a]
        vx, vy, vz = xs[c] - xs[a], ys[c] - ys[a], zs[c] - zs[a]
        wx, wy, wz = xs[d] - xs[a], ys[d] - ys[a], zs[d] - zs[a]
        det = ux * (vy * wz - vz * wy) - uy * (vx * wz - vz * wx) + uz * (vx * wy - vy * wx)
        return (det > 0) - (det < 0)

    def volume6(self, a, b, c, d) -> ExactScalar:
        xs, ys, zs = self.xs, self.ys, self.zs
        ux, uy, uz = xs[b] - xs[a], ys[b] - ys[a], zs[b] - zs[a]
        vx, vy, vz = xs[c] - xs[a], ys[c] - ys[a], zs[c] - zs[a]
        wx, wy, wz = xs[d] - xs[a], ys[d] - ys[a], zs[d] - zs[a]
        det = ux * (vy * wz - vz * wy) - uy * (vx * wz - vz * wx) + uz * (vx * wy - vy * wx)
        sx, sy, sz = self.scale
        return sx * sy * sz * det

    def insphere(self, a, b, c, d, e) -> int:
        """Sign convention as :func:`~cuboidtess.predicates.insphere`; ``abcd`` must be positive."""
        xs, ys, zs = self.xs, self.ys, self.zs
        wx, wy, wz = self.weights
        ex, ey, ez = xs[e], ys[e], zs[e]
        ax, ay, az = xs[a] - ex, ys[a] - ey, zs[a] - ez
        bx, by, bz = xs[b] - ex, ys[b] - ey, zs[b] - ez
        cx, cy, cz = xs[c] - ex, ys[c] - ey, zs[c] - ez
        dx, dy, dz = xs[d] - ex, ys[d] - ey, zs[d] - ez
        ab = ax * by - bx * ay
        bc = bx * cy - cx * by
        cd = cx * dy - dx * cy
        da = dx * ay - ax * dy
        ac = ax * cy - cx * ay
        bd = bx * dy - dx * by
        abc = az * bc - bz * ac + cz * ab
        bcd = bz * cd - cz * bd + dz * bc
        cda = cz * da + dz * ac + az * cd
        dab = dz * ab + az * bd + bz * da
        al = wx * ax * ax + wy * ay * ay + wz * az * az
        bl = wx * bx * bx + wy * by * by + wz * bz * bz
        cl = wx * cx * cx + wy * cy * cy + wz * cz * cz
        dl = wx * dx * dx + wy * dy * dy + wz * dz * dz
        det = (dl * abc - cl * dab) + (bl * cda - al * bcd)
        return (det < 0) - (det > 0)

    def plane_key(self, a, b, c):
        xs, ys, zs = self.xs, self.ys, self.zs
        ux, uy, uz = xs[b] - xs[a], ys[b] - ys[a], zs[b] - zs[a]
        vx, vy, vz = xs[c] - xs[a], ys[c] - ys[a], zs[c] - zs[a]
        nx, ny, nz = uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx
        g = gcd(gcd(nx, ny), nz)
        if g == 0:
            return None  # collinear points span no plane
        nx, ny, nz = nx // g, ny // g, nz // g
        if nx < 0 or (nx == 0 and (ny < 0 or (ny == 0 and nz < 0))):
            nx, ny, nz = -nx, -ny, -nz
        return (nx, ny, nz, nx * xs[a] + ny * ys[a] + nz * zs[a])

    def metric_dot(self, a, b, c, d) -> int:
        """Sign of ``(p_b - p_a) . (p_d - p_c)`` in physical space."""
        xs, ys, zs = self.xs, self.ys, self.zs
        wx, wy, wz = self.weights
        v = (
            wx * (xs[b] - xs[a]) * (xs[d] - xs[c])
            + wy * (ys[b] - ys[a]) * (ys[d] - ys[c])
            + wz * (zs[b] - zs[a]) * (zs[d] - zs[c])
        )
        return (v > 0) - (v < 0)

    def grid_center(self, a, b, c, d):
        """Circumcenter in grid coordinates, as a tuple of Fractions."""
        wts = self.weights
        p0 = self.coords[a]
        rows = []
        for q in (b, c, d):
            pq = self.coords[q]
            u = [pq[k] - p0[k] for k in range(3)]
            rows.append(([2 * wts[k] * u[k] for k in range(3)], sum(wts[k] * u[k] * u[k] for k in range(3))))
        m = [r[0] for r in rows]
        rhs = [r[1] for r in rows]
        den = _det3i(m)
        out = []
        for k in range(3):
            mk = [row[:] for row in m]
            for i in range(3):
                mk[i][k] = rhs[i]
            out.append(Fraction(_det3i(mk), den) + p0[k])
        return tuple(out)

    def center(self, a, b, c, d) -> Point3:
        g = self.grid_center(a, b, c, d)
        return Point3(*(self.scale[k] * g[k] for k in range(3)))

    def point(self, i) -> Point3:
        p = self.coords[i]
        return Point3(*(self.scale[k] * p[k] for k in range(3)))

    def sphere(self, a, b, c, d) -> Sphere:
        cen = self.center(a, b, c, d)
        rel = self.point(a) - cen
        return Sphere(cen, dot(rel, rel))


def _det3i(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


class ExactKernel:
    """Slow general path over Q(sqrt 2) coordinates."""

    exact = True

    def __init__(self, points: Sequence[Point3], far=None):
        self.n = len(points)
        if far is None:
            extent = 1
            for p in points:
                for v in p:
                    extent = max(extent, int(abs(float(v))) + 1)
            far = 1000 * extent * extent
        self.far = far
        m = far
        sup = [Point3.of(-m, -m, -m), Point3.of(5 * m, -m, -m), Point3.of(-m, 5 * m, -m), Point3.of(-m, -m, 5 * m)]
        self.points = list(points) + sup

    def with_far(self, far) -> "ExactKernel":
        return ExactKernel(self.points[: self.n], far)

    def orient(self, a, b, c, d) -> int:
        p = self.points
        return orient3d(p[a], p[b], p[c], p[d])

    def volume6(self, a, b, c, d) -> ExactScalar:
        p = self.points
        return tet_volume6(p[a], p[b], p[c], p[d])

    def insphere(self, a, b, c, d, e) -> int:
        p = self.points
        return insphere(p[a], p[b], p[c], p[d], p[e])

    def plane_key(self, a, b, c):
        p = self.points
        u, v = p[b] - p[a], p[c] - p[a]
        n = (u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x)
        lead = next((x for x in n if sign(x) != 0), None)
        if lead is None:
            return None  # collinear points span no plane
        n = tuple(x / lead for x in n)
        return n + (n[0] * p[a].x + n[1] * p[a].y + n[2] * p[a].z,)

    def metric_dot(self, a, b, c, d) -> int:
        p = self.points
        return sign(dot(p[b] - p[a], p[d] - p[c]))

    def center(self, a, b, c, d) -> Point3:
        return self.sphere(a, b, c, d).center

    def point(self, i) -> Point3:
        return self.points[i]

    def sphere(self, a, b, c, d) -> Sphere:
        p = self.points
        return circumsphere(p[a], p[b], p[c], p[d])


def lattice_form(points: Sequence[Point3]):
    """Return ``(coords, weights, scale)`` if the points fit a scaled lattice, else None."""
    axes = []
    for k in range(3):
        vals = [p[k] for p in points]
        if all(v.irr == 0 for v in vals):
            base, coefs = ONE, [v.rat for v in vals]
        elif all(v.rat == 0 for v in vals):
            base, coefs = SQRT2, [v.irr for v in vals]
        else:
            return None
        den = lcm(*(c.denominator for c in coefs)) if coefs else 1
        axes.append((base, den, [int(c * den) for c in coefs]))
    # weight_k = (base_k / den_k)^2, scaled to coprime integers
    sq = [Fraction((2 if base == SQRT2 else 1), den * den) for base, den, _ in axes]
    common = lcm(*(q.denominator for q in sq))
    w = [int(q * common) for q in sq]
    g = gcd(*w)
    weights = tuple(x // g for x in w)
    scale = tuple(base * Fraction(1, den) for base, den, _ in axes)
    coords = list(zip(*(a[2] for a in axes)))
    return coords, weights, scale


def make_kernel(points: Sequence[Point3]):
    form = lattice_form(points)
    if form is None:
        return ExactKernel(points)
    return LatticeKernel(*form)
