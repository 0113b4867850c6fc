import random

import numpy as np

from cuboidtess import fastpath
from cuboidtess.catalog import signature
from cuboidtess.configs import CASE_DIMS, N_AXIS, config_points, from_mask, intersection_config
from cuboidtess.delaunay import tessellate
from cuboidtess.fvm import circumcenter_inside


def _compare(cfgs):
    codes, code_len, cell_cfg, vmask, fvm_ok = fastpath.process(cfgs)
    for i, cfg in enumerate(cfgs):
        cx = tessellate(config_points(cfg))
        want = sorted((sum(1 << v for v in c.vertices), signature(c).canonical_code) for c in cx.cells)
        sel = np.nonzero(cell_cfg == i)[0]
        got = sorted((int(vmask[j]), codes[j, : code_len[j]].tobytes().hex()) for j in sel)
        assert got == want, cfg.text()
        assert bool(fvm_ok[i]) == all(circumcenter_inside(c, cfg.dims) for c in cx.cells)


def test_compiled_engine_matches_main_path_on_intersection_sample():
    rng = random.Random(21)
    _compare([intersection_config(rng.randrange(N_AXIS**3)) for _ in range(150)])


def test_compiled_engine_matches_main_path_on_cube_bisection():
    rng = random.Random(22)
    _compare([from_mask(m, CASE_DIMS["A"]) for m in rng.sample(range(4096), 60)])


def test_lattice_points_reject_off_grid_fractions():
    from fractions import Fraction

    import pytest

    from cuboidtess.configs import Configuration

    cfg = Configuration(CASE_DIMS["A"], (Fraction(1, 3),) + (None,) * 11)
    with pytest.raises(ValueError):
        fastpath.lattice_points(cfg, 16)
