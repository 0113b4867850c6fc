"""Circumcenter containment check for finite-volume use.

A cell passes when its circumcenter lies in the closed cuboid
``[0, a] x [0, b] x [0, c]``.  Pieces produced by a split share the sphere of
the cell they came from, so the verdict does not depend on the criterion.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .configs import CuboidDims


def circumcenter_inside(cell, dims: CuboidDims) -> bool:
    c = cell.center
    return all(0 <= c[k] <= d for k, d in enumerate(dims))


@dataclass(frozen=True)
class Verdict:
    config: str
    ok: bool
    n_failing: int


def config_verdict(ident: str, cells: Iterable, dims: CuboidDims) -> Verdict:
    n_fail = sum(1 for cell in cells if not circumcenter_inside(cell, dims))
    return Verdict(ident, n_fail == 0, n_fail)


def write_verdicts(verdicts: Iterable[Verdict], path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["config", "ok", "n_failing"])
        for v in verdicts:
            w.writerow([v.config, int(v.ok), v.n_failing])


def read_verdicts(path) -> list:
    with open(Path(path), newline="") as fh:
        return [Verdict(r["config"], r["ok"] == "1", int(r["n_failing"])) for r in csv.DictReader(fh)]
