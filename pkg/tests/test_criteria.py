from collections import Counter

import pytest

from cuboidtess.catalog import default_catalog, signature
from cuboidtess.configs import CASE_DIMS, from_mask
from cuboidtess.criteria import (
    EDGE_RULES,
    FACE_RULES,
    Criterion,
    SplitError,
    apply_criterion,
    rules_for,
    split_cell,
    try_split,
)
from cuboidtess.exact import ZERO
from cuboidtess.report import final_cells, tessellate_config

CAT = default_catalog()
RULES = {r.source: r for r in FACE_RULES + EDGE_RULES}


def _cell(mask, group, case="A"):
    cx = tessellate_config(from_mask(mask, CASE_DIMS[case]))
    return next(c for c in cx.cells if CAT.classify(signature(c)) == group)


def _check_split(cell, pieces):
    # volume is conserved, pieces keep the sphere, and the cell's faces survive intact
    assert sum((p.volume6() for p in pieces), ZERO) == cell.volume6()
    for p in pieces:
        assert p.sphere == cell.sphere
        assert set(p.vertices) <= set(cell.vertices)
    seen = Counter(frozenset(f) for p in pieces for f in p.faces)
    outer = {f for f, n in seen.items() if n == 1}
    assert outer == {frozenset(f) for f in cell.faces}
    assert all(n <= 2 for n in seen.values())


# (case, mask, source): one small witness per rule, found by scanning the bisection families
WITNESSES = [
    ("A", 0x3D, "Triangular Bipyramid"),
    ("A", 0x6F, "Quadrilateral Bipyramid"),
    ("A", 0x16F, "Pentagonal Bipyramid"),
    ("A", 0x66F, "Hexagonal Bipyramid"),
    ("A", 0x3FA, "Triangular Biprism"),
    ("A", 0x13, "Generic #5"),
    ("A", 0x1FF, "Generic #9"),
    ("A", 0x356, "Generic #3"),
    ("A", 0x1BF, "Generic #6"),
    ("A", 0x37E, "Generic #7"),
    ("C", 0x1C, "Generic #5"),
    ("C", 0x6F0, "Quadrilateral Bipyramid"),
]


@pytest.mark.parametrize("case,mask,source", WITNESSES)
def test_rule_splits_into_targets(case, mask, source):
    cell = _cell(mask, source, case)
    rule = RULES[source]
    pieces = split_cell(cell, rule, CAT)
    assert tuple(sorted(CAT.classify(signature(p)) for p in pieces)) == rule.targets
    _check_split(cell, pieces)


def test_named_targets():
    assert RULES["Triangular Bipyramid"].targets == ("Tetrahedron", "Tetrahedron")
    assert RULES["Quadrilateral Bipyramid"].targets == ("Quadrilateral Pyramid",) * 2
    assert RULES["Generic #9"].targets == ("Cuboid", "Quadrilateral Pyramid")
    assert RULES["Generic #6"].targets == ("Tetrahedron", "Tetrahedron", "Tetrahedron Complement")


class _single:
    """A one-cell stand-in for a cell complex."""

    def __init__(self, cell):
        self.cells = [cell]


def test_edge_rules_need_edge_criterion():
    cell = _cell(0x1BF, "Generic #6")
    assert "Generic #6" not in rules_for(Criterion.FACES)
    assert apply_criterion(_single(cell), Criterion.FACES, CAT) == [("Generic #6", cell)]
    names = sorted(n for n, _ in apply_criterion(_single(cell), Criterion.EDGES, CAT))
    assert names == ["Tetrahedron", "Tetrahedron", "Tetrahedron Complement"]


def test_twisted_octahedron_is_kept_whole():
    # six edge midpoints forming an octahedron with no planar equator
    cell = _cell(0x353, "Quadrilateral Bipyramid")
    rule = RULES["Quadrilateral Bipyramid"]
    assert try_split(cell, rule, CAT) is None
    with pytest.raises(SplitError):
        split_cell(cell, rule, CAT)
    assert apply_criterion(_single(cell), Criterion.FACES, CAT) == [("Quadrilateral Bipyramid", cell)]


def test_optimal_leaves_cells_alone():
    cx = tessellate_config(from_mask(0xFFF, CASE_DIMS["A"]))
    out = apply_criterion(cx, Criterion.OPTIMAL, CAT)
    assert [c for _, c in out] == list(cx.cells)


@pytest.mark.parametrize("mask", [0x1FF, 0x36F, 0x6FF, 0xFFF])
@pytest.mark.parametrize("crit", [Criterion.FACES, Criterion.EDGES])
def test_split_complex_stays_conforming(mask, crit):
    cfg = from_mask(mask, CASE_DIMS["A"])
    cx = tessellate_config(cfg)
    cells = [c for _, c in final_cells(cx, crit, CAT)]
    assert sum((c.volume6() for c in cells), ZERO) == 6
    faces = Counter(frozenset(f) for c in cells for f in c.faces)
    pts = cx.points
    for f, n in faces.items():
        on_box = any(all(pts[v][k] == pts[next(iter(f))][k] for v in f) and pts[next(iter(f))][k] in (0, 1) for k in range(3))
        assert n == (1 if on_box else 2)
    names = sorted(CAT.classify(s) for s, _ in final_cells(cx, crit, CAT))
    assert names == sorted(n for n, _ in apply_criterion(cx, crit, CAT))


def test_criterion_parsing():
    assert Criterion.parse("internal-faces") is Criterion.FACES
    assert Criterion.parse("internal-edges-and-faces") is Criterion.EDGES
    assert Criterion.parse("optimal") is Criterion.OPTIMAL
    with pytest.raises(ValueError):
        Criterion.parse("coarsest")
