import random
from fractions import Fraction

import pytest

from cuboidtess.configs import CASE_DIMS, N_AXIS, config_points, from_mask, intersection_config
from cuboidtess.delaunay import DelaunayError, delaunay, merge, tessellate
from cuboidtess.exact import ZERO
from cuboidtess.kernels import ExactKernel
from cuboidtess.oracle import brute_force_cells
from cuboidtess.predicates import Point3, dot, insphere

P = Point3.of
CORNER_TET = [P(0, 0, 0), P(1, 0, 0), P(0, 1, 0), P(0, 0, 1)]
CUBE = config_points(from_mask(0, CASE_DIMS["A"]))


def test_corner_tet():
    mesh = delaunay(CORNER_TET)
    assert len(mesh.tets) == 1
    cx = merge(mesh)
    assert len(cx.cells) == 1 and len(cx.cells[0].faces) == 4
    assert brute_force_cells(CORNER_TET).key() == cx.key()


def test_cube_corners_merge_to_one_cuboid():
    mesh = delaunay(CUBE)
    assert len(mesh.tets) in (5, 6)
    cx = merge(mesh)
    (cell,) = cx.cells
    assert (len(cell.vertices), cell.n_edges, len(cell.faces)) == (8, 12, 6)
    assert all(len(f) == 4 for f in cell.faces)
    assert brute_force_cells(CUBE).key() == cx.key()


def test_cube_with_one_midpoint():
    # regression value established with the brute-force oracle
    pts = config_points(from_mask(1, CASE_DIMS["A"]))
    cx = tessellate(pts)
    assert cx.key() == ((0, 2, 4, 6, 8), (1, 3, 5, 7, 8), (2, 3, 6, 7, 8), (4, 5, 6, 7, 8))
    assert all((len(c.vertices), c.n_edges, len(c.faces)) == (5, 8, 5) for c in cx.cells)


def test_fully_refined_cube_matches_oracle():
    pts = config_points(from_mask(0xFFF, CASE_DIMS["A"]))
    assert len(pts) == 20
    assert tessellate(pts).key() == brute_force_cells(pts).key()


def test_input_errors():
    with pytest.raises(DelaunayError):
        delaunay(CORNER_TET[:3])
    with pytest.raises(DelaunayError):
        delaunay(CORNER_TET + [CORNER_TET[0]])
    with pytest.raises(DelaunayError):
        delaunay([P(0, 0, 0), P(1, 0, 0), P(0, 1, 0), P(1, 1, 0), P(2, 3, 0)])
    with pytest.raises(DelaunayError):
        brute_force_cells([P(0, 0, 0), P(1, 0, 0), P(0, 1, 0), P(1, 1, 0)])


def test_exact_kernel_path_matches_lattice_path():
    # a point set that is not on a lattice with rational scale
    pts = CUBE + [Point3(Fraction(1, 2) * CUBE[1].x, ZERO, ZERO)]
    lattice = tessellate(pts)
    exact = tessellate(pts, kernel=ExactKernel(pts))
    assert lattice.key() == exact.key()


def check_invariants(cx):
    pts = cx.points
    total = ZERO
    for cell in cx.cells:
        V, E, F = len(cell.vertices), cell.n_edges, len(cell.faces)
        assert V - E + F == 2
        s = cell.sphere
        for i, p in enumerate(pts):
            r = p - s.center
            d = (dot(r, r) - s.radius2).sign()
            if i in cell.vertices:
                assert d == 0
            else:
                assert d > 0
        total = total + cell.volume6()
    hull = [p for p in pts]
    box = [max(p[k] for p in hull) - min(p[k] for p in hull) for k in range(3)]
    assert total == box[0] * box[1] * box[2] * 6


@pytest.mark.parametrize("case", ["A", "B", "C"])
def test_invariants_on_bisection_samples(case):
    rng = random.Random(11)
    for mask in rng.sample(range(4096), 12):
        check_invariants(tessellate(config_points(from_mask(mask, CASE_DIMS[case]))))


def test_invariants_on_intersection_samples():
    rng = random.Random(12)
    for _ in range(12):
        check_invariants(tessellate(config_points(intersection_config(rng.randrange(N_AXIS**3)))))


def test_tetmesh_is_delaunay():
    pts = config_points(intersection_config(987654))
    mesh = delaunay(pts)
    for t in mesh.tets:
        for e in range(len(pts)):
            if e not in t:
                assert insphere(*(pts[i] for i in t), pts[e]) <= 0


def test_permutation_independence():
    rng = random.Random(13)
    for _ in range(5):
        pts = config_points(intersection_config(rng.randrange(N_AXIS**3)))
        ref = tessellate(pts).point_key()
        for _ in range(3):
            perm = pts[:]
            rng.shuffle(perm)
            assert tessellate(perm).point_key() == ref


def test_collinear_leading_points():
    # the first three points lie on one cube edge
    pts = [P(0, 0, 0), P(Fraction(1, 2), 0, 0), P(1, 0, 0)] + [p for p in CUBE if p not in (P(0, 0, 0), P(1, 0, 0))]
    assert tessellate(pts).point_key() == tessellate(config_points(from_mask(1, CASE_DIMS["A"]))).point_key()
