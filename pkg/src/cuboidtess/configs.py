"""1-irregular cuboid configurations.

Canonical edge order: edges 0-3 run along x and are ordered by
``(y, z) in ((0,0), (1,0), (0,1), (1,1))``; edges 4-7 run along y ordered by
``(x, z)``; edges 8-11 run along z ordered by ``(x, y)``.  Corner ``i`` sits at
``(i & 1, i >> 1 & 1, i >> 2 & 1)`` in units of the edge lengths.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import gcd, lcm
from typing import Iterator, Optional

from .exact import ONE, SQRT2, ExactScalar, as_exact, format_exact, parse
from .kernels import LatticeKernel
from .predicates import Point3

N_EDGES = 12
HALF = Fraction(1, 2)


class ConfigError(ValueError):
    pass


def edge_axis(e: int) -> int:
    return e // 4


def edge_base(e: int) -> tuple:
    """Unit-cube coordinates of the low end of edge ``e`` (the moving axis is 0)."""
    axis, j = divmod(e, 4)
    lo, hi = j & 1, j >> 1
    others = [k for k in range(3) if k != axis]
    out = [0, 0, 0]
    out[others[0]] = lo
    out[others[1]] = hi
    return tuple(out)


@dataclass(frozen=True)
class CuboidDims:
    a: ExactScalar
    b: ExactScalar
    c: ExactScalar

    def __post_init__(self):
        for v in (self.a, self.b, self.c):
            if as_exact(v).sign() <= 0:
                raise ConfigError("cuboid edge lengths must be positive")

    @classmethod
    def of(cls, a, b, c) -> "CuboidDims":
        return cls(as_exact(a), as_exact(b), as_exact(c))

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def text(self) -> str:
        return ",".join(format_exact(v) for v in self)


# unit-a normalisations of the three aspect ratios studied
CASE_DIMS = {
    "A": CuboidDims.of(1, 1, 1),
    "B": CuboidDims.of(1, 2, 4),
    "C": CuboidDims(ONE, SQRT2, SQRT2),
}


@dataclass(frozen=True)
class Configuration:
    dims: CuboidDims
    steiner: tuple  # 12 entries, Fraction in (0, 1) or None

    def __post_init__(self):
        if len(self.steiner) != N_EDGES:
            raise ConfigError("a configuration needs 12 edge entries")
        for f in self.steiner:
            if f is not None and not (0 < f < 1):
                raise ConfigError(f"Steiner fraction {f} outside (0, 1)")

    @property
    def mask(self) -> int:
        return sum(1 << e for e, f in enumerate(self.steiner) if f is not None)

    def text(self) -> str:
        edges = ",".join("-" if f is None else f"{f.numerator}/{f.denominator}" for f in self.steiner)
        return f"dims={self.dims.text()};edges={edges}"

    def ident(self) -> str:
        """Short identifier used in reports and verdict files."""
        if all(f is None or f == HALF for f in self.steiner):
            return f"{self.mask:03x}"
        return ",".join("-" if f is None else f"{f.numerator}/{f.denominator}" for f in self.steiner)


def from_mask(mask: int, dims: CuboidDims) -> Configuration:
    if not 0 <= mask < 1 << N_EDGES:
        raise ConfigError(f"mask {mask:#x} out of range")
    return Configuration(dims, tuple(HALF if mask >> e & 1 else None for e in range(N_EDGES)))


def parse_dims(text: str) -> CuboidDims:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"dims need three values: {text!r}")
    return CuboidDims(*(parse(p) for p in parts))


def parse_config(text: str, dims: Optional[CuboidDims] = None) -> Configuration:
    """Parse ``dims=a,b,c;edges=f0,...,f11`` or a 12-bit hex mask such as ``0x3f``."""
    text = text.strip()
    if "edges=" not in text:
        try:
            mask = int(text, 16)
        except ValueError:
            raise ConfigError(f"not a configuration: {text!r}") from None
        return from_mask(mask, dims or CASE_DIMS["A"])
    fields = dict(part.split("=", 1) for part in text.split(";") if part)
    if "dims" in fields:
        dims = parse_dims(fields["dims"])
    elif dims is None:
        dims = CASE_DIMS["A"]
    edges = fields["edges"].split(",")
    if len(edges) != N_EDGES:
        raise ConfigError("expected 12 edge entries")
    steiner = []
    for e in edges:
        if e.strip() == "-":
            steiner.append(None)
        else:
            v = parse(e)
            if not v.is_rational():
                raise ConfigError("Steiner fractions must be rational")
            steiner.append(v.rat)
    return Configuration(dims, tuple(steiner))


def bisection_configs(dims: CuboidDims) -> Iterator[Configuration]:
    for mask in range(1 << N_EDGES):
        yield from_mask(mask, dims)


def config_points(cfg: Configuration) -> list:
    dims = list(cfg.dims)
    pts = []
    for i in range(8):
        pts.append(Point3(*(dims[k] if i >> k & 1 else ExactScalar() for k in range(3))))
    for e, f in enumerate(cfg.steiner):
        if f is None:
            continue
        axis = edge_axis(e)
        base = edge_base(e)
        pts.append(Point3(*((dims[k] * f) if k == axis else (dims[k] if base[k] else ExactScalar()) for k in range(3))))
    return pts


def _axis_scale(d: ExactScalar):
    """Split an edge length into (base**2, rational factor) with base in {1, sqrt 2}."""
    if d.irr == 0:
        return 1, d.rat
    if d.rat == 0:
        return 2, d.irr
    return None


def config_lattice(cfg: Configuration):
    """Integer grid form ``(coords, weights, scale)`` of :func:`config_points`, or None."""
    splits = [_axis_scale(d) for d in cfg.dims]
    if any(s is None for s in splits):
        return None
    dens = [1, 1, 1]
    for e, f in enumerate(cfg.steiner):
        if f is not None:
            k = edge_axis(e)
            dens[k] = lcm(dens[k], f.denominator)
    # physical step along axis k is dims[k] / dens[k]; its square fixes the weight
    sq = [Fraction(b2) * r * r / (dens[k] * dens[k]) for k, (b2, r) in enumerate(splits)]
    common = lcm(*(q.denominator for q in sq))
    w = [int(q * common) for q in sq]
    g = gcd(*w)
    weights = tuple(x // g for x in w)
    scale = tuple(d * Fraction(1, dens[k]) for k, d in enumerate(cfg.dims))
    coords = [tuple(dens[k] if i >> k & 1 else 0 for k in range(3)) for i in range(8)]
    for e, f in enumerate(cfg.steiner):
        if f is None:
            continue
        axis = edge_axis(e)
        base = edge_base(e)
        coords.append(tuple(int(f * dens[k]) if k == axis else dens[k] * base[k] for k in range(3)))
    return coords, weights, scale


def config_kernel(cfg: Configuration):
    form = config_lattice(cfg)
    if form is None:
        from .kernels import ExactKernel

        return ExactKernel(config_points(cfg))
    return LatticeKernel(*form)


# -- intersection placements --------------------------------------------------


def _insertion_positions() -> list:
    """Distinct 4-edge position tuples reachable by the midpoint insertion rule.

    The first point on a group of parallel edges goes to 1/2; every later point
    picks a gap between the already placed points (or an edge end) and lands
    at its midpoint.  Tuples are sorted with ``None`` (no point) first.
    """
    seen = set()
    stack = [(None,) * 4]
    while stack:
        tup = stack.pop()
        if tup in seen:
            continue
        seen.add(tup)
        placed = sorted(f for f in tup if f is not None)
        bounds = [Fraction(0)] + placed + [Fraction(1)]
        gaps = [(bounds[i] + bounds[i + 1]) / 2 for i in range(len(bounds) - 1)]
        for j in range(4):
            if tup[j] is None:
                for g in gaps:
                    stack.append(tup[:j] + (g,) + tup[j + 1 :])
    key = lambda t: tuple((0, 0) if f is None else (1, f) for f in t)
    return sorted(seen, key=key)


AXIS_POSITIONS = tuple(_insertion_positions())
N_AXIS = len(AXIS_POSITIONS)
_AXIS_INDEX = {t: i for i, t in enumerate(AXIS_POSITIONS)}


def intersection_config(index: int) -> Configuration:
    """Configuration number ``index`` of the intersection stream (x slowest)."""
    if not 0 <= index < N_AXIS**3:
        raise ConfigError(f"intersection index {index} out of range")
    ix, rest = divmod(index, N_AXIS * N_AXIS)
    iy, iz = divmod(rest, N_AXIS)
    steiner = AXIS_POSITIONS[ix] + AXIS_POSITIONS[iy] + AXIS_POSITIONS[iz]
    return Configuration(CASE_DIMS["A"], steiner)


def intersection_index(cfg: Configuration) -> int:
    ix, iy, iz = (_AXIS_INDEX[cfg.steiner[4 * k : 4 * k + 4]] for k in range(3))
    return (ix * N_AXIS + iy) * N_AXIS + iz


def intersection_configs() -> Iterator[Configuration]:
    for i in range(N_AXIS**3):
        yield intersection_config(i)


# -- cube symmetries ----------------------------------------------------------

# (perm, flip): new coordinate k is old coordinate perm[k], mirrored if flip[k]
CUBE_SYMMETRIES = tuple((p, f) for p in permutations(range(3)) for f in product((0, 1), repeat=3))


def transform_config(cfg: Configuration, sym) -> Configuration:
    """Image of a unit-cube configuration under a cube symmetry."""
    perm, flip = sym
    steiner = [None] * N_EDGES
    for e, f in enumerate(cfg.steiner):
        if f is None:
            continue
        axis = edge_axis(e)
        base = edge_base(e)
        new_axis = perm.index(axis)
        nb = [0, 0, 0]
        for k in range(3):
            if k != new_axis:
                v = base[perm[k]]
                nb[k] = 1 - v if flip[k] else v
        others = [k for k in range(3) if k != new_axis]
        j = nb[others[0]] + 2 * nb[others[1]]
        steiner[4 * new_axis + j] = 1 - f if flip[new_axis] else f
    return Configuration(cfg.dims, tuple(steiner))


def transform_point(p: tuple, sym) -> tuple:
    perm, flip = sym
    return tuple(1 - p[perm[k]] if flip[k] else p[perm[k]] for k in range(3))


def axis_action_tables():
    """Integer tables for the action of every cube symmetry on intersection indices.

    Returns ``perms`` (48 x 3, source axis of each new axis) and ``tables``
    (48 x 3 x N_AXIS) such that symmetry ``s`` maps ``(i0, i1, i2)`` to
    ``(tables[s, k, i[perms[s, k]]] for k in 0..2)``.
    """
    import numpy as np

    perms = np.array([p for p, _ in CUBE_SYMMETRIES], dtype=np.int64)
    tables = np.zeros((len(CUBE_SYMMETRIES), 3, N_AXIS), dtype=np.int64)
    empty = (None,) * 4
    for s, sym in enumerate(CUBE_SYMMETRIES):
        for k in range(3):
            src = sym[0][k]
            for i, tup in enumerate(AXIS_POSITIONS):
                steiner = [None] * N_EDGES
                steiner[4 * src : 4 * src + 4] = tup
                img = transform_config(Configuration(CASE_DIMS["A"], tuple(steiner)), sym)
                part = img.steiner[4 * k : 4 * k + 4]
                assert all(img.steiner[4 * m : 4 * m + 4] == empty for m in range(3) if m != k)
                tables[s, k, i] = _AXIS_INDEX[part]
    return perms, tables
