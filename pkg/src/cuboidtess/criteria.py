"""Element-reduction criteria: splitting co-spherical cells into catalog elements.

A split never creates vertices and never puts a diagonal on a face of the
cell, so the trace on the cuboid boundary (and on neighbouring cells) is
unchanged.  Pieces are convex hulls of vertex subsets; every subset of a
co-spherical set is co-spherical, so each piece inherits the cell's sphere.

Decompositions are found by search and accepted only if the pieces classify
exactly to the rule's targets.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

from .catalog import Catalog, signature
from .delaunay import CoSphericalCell
from .exact import ZERO
from .oracle import _cell_faces


class Criterion(str, Enum):
    OPTIMAL = "optimal"
    FACES = "faces"
    EDGES = "edges"

    @classmethod
    def parse(cls, text: str) -> "Criterion":
        aliases = {"internal-faces": "faces", "internal-edges-and-faces": "edges"}
        return cls(aliases.get(text, text))


class SplitError(RuntimeError):
    pass


@dataclass(frozen=True)
class SplitRule:
    source: str
    targets: tuple  # sorted element names, with repetition
    mechanism: str  # equatorial-face | internal-face-search | internal-edge-search

    @property
    def interior_edges(self) -> bool:
        return self.mechanism == "internal-edge-search"


def _rule(source, targets, mechanism):
    return SplitRule(source, tuple(sorted(targets)), mechanism)


FACE_RULES = (
    _rule("Triangular Bipyramid", ["Tetrahedron"] * 2, "equatorial-face"),
    _rule("Quadrilateral Bipyramid", ["Quadrilateral Pyramid"] * 2, "equatorial-face"),
    _rule("Pentagonal Bipyramid", ["Pentagonal Pyramid"] * 2, "equatorial-face"),
    _rule("Hexagonal Bipyramid", ["Hexagonal Pyramid"] * 2, "equatorial-face"),
    _rule("Triangular Biprism", ["Triangular Prism"] * 2, "equatorial-face"),
    _rule("Generic #5", ["Triangular Prism", "Quadrilateral Pyramid"], "internal-face-search"),
    _rule("Generic #8", ["Triangular Prism"] + ["Quadrilateral Pyramid"] * 2, "internal-face-search"),
    _rule("Generic #9", ["Cuboid", "Quadrilateral Pyramid"], "internal-face-search"),
)

EDGE_RULES = (
    _rule("Generic #3", ["Tetrahedron"] * 2 + ["Quadrilateral Pyramid"], "internal-edge-search"),
    _rule("Generic #6", ["Tetrahedron"] * 2 + ["Tetrahedron Complement"], "internal-edge-search"),
    _rule(
        "Generic #7",
        ["Tetrahedron"] * 2 + ["Quadrilateral Pyramid", "Deformed Prism"],
        "internal-edge-search",
    ),
)


def rules_for(crit: Criterion) -> dict:
    crit = Criterion(crit)
    if crit is Criterion.OPTIMAL:
        return {}
    rules = FACE_RULES if crit is Criterion.FACES else FACE_RULES + EDGE_RULES
    return {r.source: r for r in rules}


# -- geometry of a single cell --------------------------------------------------


def _piece(kernel, verts) -> CoSphericalCell:
    verts = tuple(sorted(verts))
    tet = next(q for q in combinations(verts, 4) if kernel.orient(*q) != 0)
    a, b, c, d = tet
    if kernel.orient(a, b, c, d) < 0:
        b, c = c, b
    return CoSphericalCell(verts, _cell_faces(kernel, verts), ((a, b, c, d),), kernel)


def _edges(faces) -> set:
    out = set()
    for f in faces:
        for i in range(len(f)):
            u, v = f[i], f[(i + 1) % len(f)]
            out.add((min(u, v), max(u, v)))
    return out


class _CellGeometry:
    def __init__(self, cell):
        self.cell = cell
        self.kernel = cell.kernel
        self.face_sets = [frozenset(f) for f in cell.faces]
        self.edges = _edges(cell.faces)

    def boundary_face(self, fs: frozenset):
        """Index of the cell face whose plane contains ``fs``, or None."""
        k = self.kernel
        a, b, c = list(fs)[:3]
        for i, f in enumerate(self.cell.faces):
            if fs <= self.face_sets[i]:
                return i
            if all(k.orient(a, b, c, q) == 0 for q in f):
                return i
        return None

    def edge_ok(self, u, v, interior: bool) -> bool:
        e = (min(u, v), max(u, v))
        if e in self.edges:
            return True
        if not interior:
            return False
        # a new edge may not run along a face of the cell (that is a diagonal)
        return not any(u in f and v in f for f in self.face_sets)

    def admissible(self, piece, interior: bool) -> bool:
        for f in piece.faces:
            fs = frozenset(f)
            bi = self.boundary_face(fs)
            if bi is not None and fs != self.face_sets[bi]:
                return False
            for i in range(len(f)):
                if not self.edge_ok(f[i], f[(i + 1) % len(f)], interior):
                    return False
        return True


def _side(kernel, fs, q) -> int:
    """Side of ``q`` relative to the plane of face ``fs``, in a canonical orientation."""
    a, b, c = sorted(fs)[:3]
    return kernel.orient(a, b, c, q)


def split_cell(cell, rule: SplitRule, catalog: Catalog) -> list:
    """Decompose ``cell`` into pieces classifying exactly to ``rule.targets``."""
    pieces = try_split(cell, rule, catalog)
    if pieces is None:
        raise SplitError(f"no decomposition of {rule.source} with vertices {cell.vertices} into {rule.targets}")
    return pieces


def try_split(cell, rule: SplitRule, catalog: Catalog):
    """Like :func:`split_cell` but returns None when no decomposition exists.

    Some cells share the combinatorics of a rule's source but not its
    geometry (e.g. a twisted octahedron has no planar equator), so they cannot
    be split without new vertices; criteria keep such cells whole.
    """
    geo = _CellGeometry(cell)
    kernel = cell.kernel
    targets = Counter(rule.targets)
    sizes = set()
    for name in targets:
        sizes.update(e.signature.V for e in catalog.entries if e.group == name)
    cands = []
    for m in sorted(sizes):
        for sub in combinations(cell.vertices, m):
            if not any(kernel.orient(*q) != 0 for q in combinations(sub, 4)):
                continue
            piece = _piece(kernel, sub)
            if len({v for f in piece.faces for v in f}) != m:
                continue  # some chosen point is not a vertex of the hull
            if not geo.admissible(piece, rule.interior_edges):
                continue
            name = catalog.classify(signature(piece))
            if name in targets:
                cands.append((name, piece))
    total = cell.volume6()
    best = None
    for sol in _covers(cell, cands, targets, kernel):
        if sum((p.volume6() for _, p in sol), ZERO) != total:
            continue
        key = tuple(sorted(p.vertices for _, p in sol))
        if best is None or key < best[0]:
            best = (key, sol)
    if best is None:
        return None
    return [p for _, p in sorted(best[1], key=lambda t: t[1].vertices)]


def _covers(cell, cands, targets, kernel):
    """Exact covers of ``cell`` by candidate pieces with the target name multiset.

    An open face is ``(vertex set, side, cycle)``: some piece still has to be
    placed on ``side`` of its plane with exactly that face.  Initially the
    cell's own faces are open towards the inside; every chosen piece closes
    the open faces it matches and opens its remaining faces towards the
    outside of itself.  A cover is complete when nothing is open.
    """
    boundary = {frozenset(f) for f in cell.faces}
    info = []
    for name, piece in cands:
        faces = {}
        for f in piece.faces:
            fs = frozenset(f)
            q = next(v for v in piece.vertices if v not in fs)
            faces[fs] = (_side(kernel, fs, q), f)
        info.append((name, piece, faces))

    def rec(used, need, open_faces):
        if not open_faces:
            if not +need:
                yield [info[i][:2] for i in used]
            return
        fs, side, _ = min(open_faces, key=lambda t: sorted(t[0]))
        for idx, (name, piece, faces) in enumerate(info):
            if need[name] <= 0 or idx in used or fs not in faces or faces[fs][0] != side:
                continue
            rest = {t[0]: t for t in open_faces}
            del rest[fs]
            ok = True
            for g, (s, f) in faces.items():
                if g == fs:
                    continue
                if g in rest:
                    if rest[g][1] != s:
                        ok = False
                        break
                    del rest[g]
                elif g in boundary:
                    ok = False  # that cell face is covered already
                    break
                else:
                    rest[g] = (g, -s, f)
            if not ok:
                continue
            need[name] -= 1
            yield from rec(used + [idx], need, list(rest.values()))
            need[name] += 1

    start = []
    for f in cell.faces:
        fs = frozenset(f)
        q = next(v for v in cell.vertices if v not in fs)
        start.append((fs, _side(kernel, fs, q), f))
    yield from rec([], Counter(targets), start)


# -- applying a criterion to a complex ---------------------------------------


def cell_key(cell) -> tuple:
    """Translation-free geometric key of a cell, used to cache splits and signatures."""
    k = cell.kernel
    pts = sorted(k.point(i) for i in cell.vertices)
    o = pts[0]
    return tuple(p - o for p in pts)


def apply_criterion(cx, crit, catalog: Catalog, split_cache: dict | None = None) -> list:
    """Classified final elements ``[(name, cell), ...]`` of a merged complex."""
    rules = rules_for(crit)
    out = []
    for cell in cx.cells:
        name = catalog.classify(signature(cell))
        rule = rules.get(name)
        pieces = try_split(cell, rule, catalog) if rule is not None else None
        if pieces is None:
            out.append((name, cell))
            continue
        for p in pieces:
            out.append((catalog.classify(signature(p)), p))
    return out
