"""Delaunay tetrahedralization of small point sets and co-spherical merging.

``delaunay`` builds a tetrahedral mesh by Bowyer-Watson insertion with exact
predicates.  Points exactly on a circumsphere are not in conflict, so a
co-spherical cluster ends up cut into some tetrahedra; ``merge`` glues those
back into one cell per empty sphere, which makes the result independent of
insertion order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .exact import ZERO, ExactScalar
from .kernels import make_kernel
from .predicates import Point3, Sphere

# faces of a positive tet (a, b, c, d), listed opposite vertex 0..3 and
# ordered so that (face, opposite vertex) is again positive
_INNER_FACES = ((1, 3, 2), (0, 2, 3), (0, 3, 1), (0, 1, 2))


class DelaunayError(ValueError):
    pass


@dataclass
class TetMesh:
    points: list
    tets: list  # positively oriented 4-tuples of point indices
    adjacency: list  # adjacency[t][i] = tet across the face opposite vertex i, or -1
    kernel: object = field(repr=False, default=None)


@dataclass
class CoSphericalCell:
    vertices: tuple  # sorted point indices
    faces: tuple  # polygons as index cycles, counter-clockwise seen from outside
    tets: tuple = field(repr=False, default=())
    kernel: object = field(repr=False, default=None, compare=False)

    @property
    def n_edges(self) -> int:
        return sum(len(f) for f in self.faces) // 2

    @cached_property
    def sphere(self) -> Sphere:
        a, b, c, d = self.tets[0]
        return self.kernel.sphere(a, b, c, d)

    @cached_property
    def center(self) -> Point3:
        a, b, c, d = self.tets[0]
        return self.kernel.center(a, b, c, d)

    def volume6(self) -> ExactScalar:
        """Six-fold volume by fanning every face to vertex 0."""
        k = self.kernel
        apex = self.vertices[0]
        total = ZERO
        for f in self.faces:
            if apex in f:
                continue
            for i in range(1, len(f) - 1):
                # faces are outward, so the apex sees them negatively
                total = total - k.volume6(f[0], f[i], f[i + 1], apex)
        return total


@dataclass
class CellComplex:
    points: list
    cells: list
    kernel: object = field(repr=False, default=None)

    def key(self) -> tuple:
        """Cell vertex sets in a canonical order (the equality notion for complexes)."""
        return tuple(sorted(c.vertices for c in self.cells))

    def point_key(self) -> tuple:
        """Like :meth:`key` but with coordinates instead of indices."""
        pts = self.points
        return tuple(sorted(tuple(sorted(pts[i] for i in c.vertices)) for c in self.cells))


def _check_input(points, kernel):
    n = len(points)
    if n < 4:
        raise DelaunayError("need at least four points")
    if len(set(points)) != n:
        raise DelaunayError("duplicate points")
    # find a non-degenerate tetrahedron
    for i in range(2, n):
        if kernel.plane_key(0, 1, i) is None:
            continue
        for j in range(i + 1, n):
            if kernel.orient(0, 1, i, j) != 0:
                return
    # fall back to every quadruple (e.g. when the first points are degenerate)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for m in range(k + 1, n):
                    if kernel.orient(i, j, k, m) != 0:
                        return
    raise DelaunayError("all points are coplanar")


def _bowyer_watson(kernel):
    n = kernel.n
    s = (n, n + 1, n + 2, n + 3)
    if kernel.orient(*s) < 0:
        s = (n, n + 2, n + 1, n + 3)
    tets = [s]
    nbr = [[-1, -1, -1, -1]]
    alive = [True]
    insphere = kernel.insphere
    for p in range(n):
        # the conflict region is connected: find one member, then flood fill
        seed = next((t for t in range(len(tets) - 1, -1, -1) if alive[t] and insphere(*tets[t], p) > 0), None)
        if seed is None:
            raise DelaunayError(f"point {p} lies outside the bounding simplex")
        bad = [seed]
        badset = {seed}
        seen = {seed}
        i = 0
        while i < len(bad):
            for nb in nbr[bad[i]]:
                if nb >= 0 and nb not in seen:
                    seen.add(nb)
                    if insphere(*tets[nb], p) > 0:
                        bad.append(nb)
                        badset.add(nb)
            i += 1
        edge_slot = {}
        for t in bad:
            alive[t] = False
            tv = tets[t]
            tn = nbr[t]
            for i in range(4):
                nb = tn[i]
                if nb in badset:
                    continue
                f0, f1, f2 = (tv[j] for j in _INNER_FACES[i])
                new = len(tets)
                tets.append((f0, f1, f2, p))
                nbr.append([-1, -1, -1, nb])
                alive.append(True)
                if nb >= 0:
                    nn = nbr[nb]
                    nn[nn.index(t)] = new
                # side faces: opposite f0 is (f1, f2, p), etc.
                for slot, (u, v) in enumerate(((f1, f2), (f0, f2), (f0, f1))):
                    key = (u, v) if u < v else (v, u)
                    other = edge_slot.pop(key, None)
                    if other is None:
                        edge_slot[key] = (new, slot)
                    else:
                        ot, os = other
                        nbr[new][slot] = ot
                        nbr[ot][os] = new
    return tets, nbr, alive


def _hull_ok(kernel, tets, nbr, keep) -> bool:
    """Every boundary face of the kept tets must be a supporting face of the input."""
    n = kernel.n
    for t in keep:
        tv = tets[t]
        for i in range(4):
            nb = nbr[t][i]
            if nb >= 0 and nb in keep:
                continue
            f = [tv[j] for j in _INNER_FACES[i]]
            for q in range(n):
                if q not in tv and kernel.orient(f[0], f[1], f[2], q) < 0:
                    return False
    return True


def _triangulate(kernel):
    n = kernel.n
    for _ in range(6):
        tets, nbr, alive = _bowyer_watson(kernel)
        keep = {t for t in range(len(tets)) if alive[t] and max(tets[t]) < n}
        if _hull_ok(kernel, tets, nbr, keep):
            break
        kernel = kernel.with_far(kernel.far * 10**6)
    else:  # pragma: no cover - exact arithmetic makes this unreachable in practice
        raise DelaunayError("could not recover the convex hull")
    order = sorted(keep)
    remap = {t: i for i, t in enumerate(order)}
    out_tets = [tets[t] for t in order]
    adj = [[remap.get(nb, -1) for nb in nbr[t]] for t in order]
    return kernel, out_tets, adj


def delaunay(points: Sequence[Point3], kernel=None) -> TetMesh:
    """Delaunay tetrahedralization with ties broken by insertion (index) order."""
    points = list(points)
    if kernel is None:
        kernel = make_kernel(points)
    _check_input(points, kernel)
    kernel, tets, adj = _triangulate(kernel)
    return TetMesh(points, tets, adj, kernel)


def merge(mesh: TetMesh) -> CellComplex:
    """Glue face-adjacent tetrahedra with a common circumsphere into maximal cells."""
    kernel = mesh.kernel
    tets, adj = mesh.tets, mesh.adjacency
    parent = list(range(len(tets)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, tv in enumerate(tets):
        for i, nb in enumerate(adj[t]):
            if nb > t:
                nv = tets[nb]
                apex = nv[adj[nb].index(t)]
                if kernel.insphere(*tv, apex) == 0:
                    ra, rb = find(t), find(nb)
                    if ra != rb:
                        parent[ra] = rb
    groups = {}
    for t in range(len(tets)):
        groups.setdefault(find(t), []).append(t)
    cells = [_build_cell(kernel, tets, adj, ts) for ts in groups.values()]
    cells.sort(key=lambda c: c.vertices)
    return CellComplex(mesh.points, cells, kernel)


def _build_cell(kernel, tets, adj, members) -> CoSphericalCell:
    mset = set(members)
    verts = set()
    planes = {}
    for t in members:
        tv = tets[t]
        verts.update(tv)
        for i in range(4):
            if adj[t][i] in mset:
                continue
            a, b, c = (tv[j] for j in _INNER_FACES[i])
            # outward orientation is the reverse of the inner one
            tri = (a, c, b)
            planes.setdefault(kernel.plane_key(a, b, c), []).append(tri)
    faces = tuple(sorted(_polygon(tris) for tris in planes.values()))
    return CoSphericalCell(tuple(sorted(verts)), faces, tuple(tets[t] for t in members), kernel)


def _polygon(tris) -> tuple:
    """Boundary cycle of a fan of coplanar, consistently oriented triangles."""
    if len(tris) == 1:
        cyc = list(tris[0])
    else:
        directed = set()
        for a, b, c in tris:
            directed.update(((a, b), (b, c), (c, a)))
        nxt = {u: v for (u, v) in directed if (v, u) not in directed}
        start = min(nxt)
        cyc = [start]
        v = nxt[start]
        while v != start:
            cyc.append(v)
            v = nxt[v]
        if len(cyc) != len(nxt):
            raise DelaunayError("face is not a simple polygon")
    i = cyc.index(min(cyc))
    return tuple(cyc[i:] + cyc[:i])


def tessellate(points: Sequence[Point3], kernel=None) -> CellComplex:
    return merge(delaunay(points, kernel))
