"""Enumeration over configuration families and frequency reports.

Workers count cells by canonical shape code; names are attached once, at
aggregation, from the catalog.  Chunk results are plain integer sums, so the
final report does not depend on the number of workers or on completion order.

The intersection family is enumerated over orbit representatives of the cube
symmetry group (48 elements); each representative is counted with the size of
its orbit.  Shape codes, element names and the circumcenter verdict are all
invariant under the group, so this is exact.
"""

from __future__ import annotations

import csv
import io
import json
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .catalog import Catalog, ShapeSignature, UnknownShapeError, default_catalog, signature
from .configs import (
    CASE_DIMS,
    N_AXIS,
    N_EDGES,
    Configuration,
    axis_action_tables,
    config_kernel,
    config_points,
    from_mask,
    intersection_config,
)
from .criteria import Criterion, cell_key, rules_for, try_split
from .delaunay import CoSphericalCell, tessellate
from .fvm import Verdict, circumcenter_inside
from .kernels import LatticeKernel
from .oracle import _cell_faces

CASES = ("A", "B", "C", "intersection")
BISECTION_CHUNK = 256
INTERSECTION_CHUNK = 2048  # orbit representatives, about 100k configurations
INTERSECTION_GRID = 16


class GoldenFormatError(ValueError):
    pass


# -- reports ------------------------------------------------------------------


@dataclass
class FrequencyReport:
    case: str
    criterion: str
    counts: dict  # element name -> count
    n_configs: int
    fvm_passing: int
    signatures: dict = field(default_factory=dict, repr=False)  # name -> ShapeSignature

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def rows(self) -> list:
        return sorted(self.counts.items(), key=lambda t: (-t[1], t[0]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# case {self.case}, criterion {self.criterion}\n")
        buf.write(f"# configurations {self.n_configs}, circumcenter-inside {self.fvm_passing}\n")
        buf.write(f"# grand total {self.total}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "count"])
        for name, n in self.rows():
            w.writerow([name, n])
        return buf.getvalue()

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv())


def load_golden(path) -> dict:
    """Read a ``name,count`` table (``#`` lines are comments)."""
    rows = {}
    with open(Path(path), newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#") and ln.strip()]
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != ["name", "count"]:
        raise GoldenFormatError(f"{path}: expected header 'name,count', got {header}")
    for row in reader:
        if len(row) != 2:
            raise GoldenFormatError(f"{path}: malformed row {row}")
        name, count = row
        if name in rows:
            raise GoldenFormatError(f"{path}: duplicate name {name!r}")
        try:
            rows[name] = int(count)
        except ValueError:
            raise GoldenFormatError(f"{path}: bad count {count!r}") from None
    return rows


def golden_path(name: str):
    from importlib import resources

    return resources.files("cuboidtess.data").joinpath("golden", name)


def compare_golden(report: FrequencyReport, golden: dict) -> list:
    """``(name, expected, got)`` for every name whose count differs."""
    names = sorted(set(golden) | set(report.counts))
    return [(n, golden.get(n, 0), report.counts.get(n, 0)) for n in names if golden.get(n, 0) != report.counts.get(n, 0)]


# -- per-configuration work -----------------------------------------------------


class _Splitter:
    """Caches piece signatures of split cells by translation-free geometry."""

    def __init__(self, crit: Criterion, catalog: Catalog):
        self.rules = rules_for(crit)
        self.catalog = catalog
        self.cache = {}

    def splits(self, sig: ShapeSignature) -> bool:
        entry = self.catalog.lookup(sig)
        return entry is not None and entry.group in self.rules

    def pieces(self, cell, sig: ShapeSignature) -> Optional[list]:
        """Signatures of the pieces ``cell`` splits into, or None if it is kept."""
        if not self.splits(sig):
            return None
        entry = self.catalog.lookup(sig)
        key = cell_key(cell)
        hit = self.cache.get(key)
        if hit is None:
            pieces = try_split(cell, self.rules[entry.group], self.catalog)
            hit = [signature(p) for p in pieces] if pieces is not None else False
            self.cache[key] = hit
        return hit or None


def final_cells(cx, crit, catalog: Catalog) -> list:
    """``(signature, cell)`` of every final element of a merged complex."""
    rules = rules_for(crit)
    out = []
    for cell in cx.cells:
        sig = signature(cell)
        entry = catalog.lookup(sig)
        pieces = try_split(cell, rules[entry.group], catalog) if entry is not None and entry.group in rules else None
        if pieces is None:
            out.append((sig, cell))
        else:
            out.extend((signature(p), p) for p in pieces)
    return out


def tessellate_config(cfg: Configuration):
    return tessellate(config_points(cfg), kernel=config_kernel(cfg))


@dataclass
class ChunkResult:
    chunk: int
    n_configs: int
    fvm_passing: int
    codes: Counter
    sigs: dict  # code -> ShapeSignature
    verdicts: list = field(default_factory=list)
    examples: dict = field(default_factory=dict)  # code -> id of a configuration containing it

    def to_json(self) -> dict:
        return {
            "chunk": self.chunk,
            "configs": self.n_configs,
            "fvm": self.fvm_passing,
            "codes": dict(sorted(self.codes.items())),
            "sigs": {c: _sig_json(s) for c, s in sorted(self.sigs.items())},
            "examples": dict(sorted(self.examples.items())),
        }

    @classmethod
    def from_json(cls, d: dict) -> "ChunkResult":
        sigs = {c: _sig_from(s) for c, s in d["sigs"].items()}
        return cls(d["chunk"], d["configs"], d["fvm"], Counter(d["codes"]), sigs, [], d.get("examples", {}))


def _sig_json(s: ShapeSignature) -> list:
    return [s.V, s.E, s.F, sorted(s.labels().items())]


def _sig_from(v: list) -> ShapeSignature:
    V, E, F, labels = v
    return ShapeSignature(V, E, F, tuple(tuple(x) for x in labels), None)


def _bisection_chunk(case: str, crit: Criterion, chunk: int, want_verdicts: bool) -> ChunkResult:
    splitter = _Splitter(crit, default_catalog()) if crit is not Criterion.OPTIMAL else None
    dims = CASE_DIMS[case]
    codes = Counter()
    sigs = {}
    fvm = 0
    verdicts = []
    examples = {}
    masks = range(chunk * BISECTION_CHUNK, min((chunk + 1) * BISECTION_CHUNK, 1 << N_EDGES))
    for mask in masks:
        cfg = from_mask(mask, dims)
        cx = tessellate_config(cfg)
        n_fail = 0
        for cell in cx.cells:
            sig = signature(cell)
            parts = splitter.pieces(cell, sig) if splitter else None
            parts = [sig] if parts is None else parts
            n_fail += not circumcenter_inside(cell, dims)
            for p in parts:
                codes[p.canonical_code] += 1
                sigs.setdefault(p.canonical_code, p)
                examples.setdefault(p.canonical_code, cfg.ident())
        fvm += n_fail == 0
        if want_verdicts:
            verdicts.append(Verdict(cfg.ident(), n_fail == 0, n_fail))
    return ChunkResult(chunk, len(masks), fvm, codes, sigs, verdicts, examples)


# -- intersection family ----------------------------------------------------------


def cache_dir() -> Path:
    """Directory for reusable derived data (orbit tables, long-run checkpoints)."""
    root = os.environ.get("CUBOIDTESS_CACHE") or os.path.join(os.path.expanduser("~"), ".cache", "cuboidtess")
    return Path(root)


def compute_orbits():
    """Orbit representatives (least index in each orbit) and orbit sizes."""
    perms, tables = axis_action_tables()
    n = N_AXIS
    i1, i2 = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i1 = i1.ravel()
    i2 = i2.ravel()
    reps, sizes = [], []
    for i0 in range(n):
        idx = np.stack([np.full_like(i1, i0), i1, i2])
        code = (i0 * n + i1) * n + i2
        is_rep = np.ones(len(code), dtype=bool)
        stab = np.zeros(len(code), dtype=np.int64)
        for s in range(len(perms)):
            j = [tables[s, k][idx[perms[s, k]]] for k in range(3)]
            img = (j[0] * n + j[1]) * n + j[2]
            is_rep &= img >= code
            stab += img == code
        reps.append(code[is_rep])
        sizes.append(len(perms) // stab[is_rep])
    return np.concatenate(reps), np.concatenate(sizes)


def intersection_orbits():
    """Cached :func:`compute_orbits` (about a minute to build)."""
    path = cache_dir() / f"orbits-{N_AXIS}.npz"
    if path.exists():
        data = np.load(path)
        return data["reps"], data["sizes"]
    reps, sizes = compute_orbits()
    if int(sizes.sum()) != N_AXIS**3:  # pragma: no cover - internal consistency
        raise RuntimeError("orbit sizes do not add up")
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp.npz")
    np.savez(tmp, reps=reps, sizes=sizes)
    os.replace(tmp, path)
    return reps, sizes


def _grid_kernel(cfg: Configuration) -> LatticeKernel:
    from fractions import Fraction

    from .fastpath import lattice_points

    g = INTERSECTION_GRID
    return LatticeKernel(lattice_points(cfg, g), (1, 1, 1), (Fraction(1, g),) * 3)


def cell_from_mask(kernel, mask: int) -> CoSphericalCell:
    verts = tuple(i for i in range(kernel.n) if mask >> i & 1)
    faces = _cell_faces(kernel, verts)
    from itertools import combinations

    a, b, c, d = next(q for q in combinations(verts, 4) if kernel.orient(*q) != 0)
    if kernel.orient(a, b, c, d) < 0:
        b, c = c, b
    return CoSphericalCell(verts, faces, ((a, b, c, d),), kernel)


_SIG_CACHE: dict = {}


def _fast_signature(code: str, cfg, kernel_fn, mask: int) -> ShapeSignature:
    sig = _SIG_CACHE.get(code)
    if sig is None:
        cell = cell_from_mask(kernel_fn(), mask)
        sig = signature(cell)
        if sig.canonical_code != code:  # pragma: no cover - engines disagree
            raise RuntimeError(f"canonical code mismatch on {cfg.text()}")
        _SIG_CACHE[code] = sig
    return sig


def intersection_batch(indices, weights, crit, catalog: Optional[Catalog] = None) -> tuple:
    """Weighted code counts, weighted circumcenter passes and signatures for a batch."""
    from . import fastpath

    crit = Criterion(crit)
    cfgs = [intersection_config(int(i)) for i in indices]
    weights = np.asarray(weights, dtype=np.int64)
    codes, code_len, cell_cfg, cell_vmask, fvm_ok = fastpath.process(cfgs, INTERSECTION_GRID)
    fvm = int(weights[fvm_ok].sum())
    # group identical code rows
    view = np.ascontiguousarray(codes).view(np.dtype((np.void, codes.shape[1]))).ravel()
    uniq, first, inv = np.unique(view, return_index=True, return_inverse=True)
    w = np.bincount(inv.ravel(), weights=weights[cell_cfg], minlength=len(uniq)).astype(np.int64)
    out = Counter()
    sigs = {}
    examples = {}
    splitter = _Splitter(crit, catalog or default_catalog()) if crit is not Criterion.OPTIMAL else None
    for u, j in enumerate(first):
        code = codes[j, : code_len[j]].tobytes().hex()
        i = int(cell_cfg[j])
        sig = _fast_signature(code, cfgs[i], lambda i=i: _grid_kernel(cfgs[i]), int(cell_vmask[j]))
        if splitter is None or not splitter.splits(sig):
            out[code] += int(w[u])
            sigs[code] = sig
            examples.setdefault(code, cfgs[i].ident())
            continue
        # split cells: pieces per geometric instance (shape names do not depend on the instance)
        for c in np.nonzero(inv.ravel() == u)[0]:
            ic = int(cell_cfg[c])
            cell = cell_from_mask(_grid_kernel(cfgs[ic]), int(cell_vmask[c]))
            for p in splitter.pieces(cell, sig):
                out[p.canonical_code] += int(weights[ic])
                sigs[p.canonical_code] = p
                examples.setdefault(p.canonical_code, cfgs[ic].ident())
    return out, fvm, sigs, examples


def _intersection_chunk(crit: Criterion, chunk: int, indices, weights) -> ChunkResult:
    codes, fvm, sigs, examples = intersection_batch(indices, weights, crit)
    return ChunkResult(chunk, int(np.asarray(weights).sum()), fvm, codes, sigs, [], examples)


# -- driver ---------------------------------------------------------------------


def _tasks(case: str, crit: Criterion, want_verdicts: bool):
    if case == "intersection":
        reps, sizes = intersection_orbits()
        n = (len(reps) + INTERSECTION_CHUNK - 1) // INTERSECTION_CHUNK
        for c in range(n):
            sl = slice(c * INTERSECTION_CHUNK, (c + 1) * INTERSECTION_CHUNK)
            yield c, (_intersection_chunk, (crit, c, reps[sl], sizes[sl]))
    else:
        n = (1 << N_EDGES) // BISECTION_CHUNK
        for c in range(n):
            yield c, (_bisection_chunk, (case, crit, c, want_verdicts))


def _call(task):
    fn, args = task
    return fn(*args)


def n_chunks(case: str) -> int:
    if case == "intersection":
        reps, _ = intersection_orbits()
        return (len(reps) + INTERSECTION_CHUNK - 1) // INTERSECTION_CHUNK
    return (1 << N_EDGES) // BISECTION_CHUNK


class Checkpoint:
    """Append-only JSON-lines file of per-chunk partial sums."""

    def __init__(self, path, case: str, crit: Criterion):
        self.path = Path(path)
        self.header = {"case": case, "criterion": Criterion(crit).value, "n_chunks": n_chunks(case)}
        self.done = {}
        if self.path.exists() and self.path.stat().st_size:
            with open(self.path, "rb") as fh:
                data = fh.read()
            lines = data.split(b"\n")
            head = json.loads(lines[0])
            if head != self.header:
                raise ValueError(f"checkpoint {path} belongs to a different run: {head}")
            good = len(lines[0]) + 1
            for ln in lines[1:]:
                if not ln:
                    break
                try:
                    d = json.loads(ln)
                except json.JSONDecodeError:
                    break  # torn final line from an interrupted write
                r = ChunkResult.from_json(d)
                self.done[r.chunk] = r
                good += len(ln) + 1
            if good < len(data):
                # drop the torn tail so that new records start on a fresh line
                with open(self.path, "r+b") as fh:
                    fh.truncate(good)
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "w") as fh:
                fh.write(json.dumps(self.header) + "\n")

    def append(self, r: ChunkResult) -> None:
        with open(self.path, "a") as fh:
            fh.write(json.dumps(r.to_json(), separators=(",", ":")) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self.done[r.chunk] = r


@dataclass
class Enumeration:
    case: str
    criterion: Criterion
    n_configs: int
    fvm_passing: int
    codes: Counter
    sigs: dict
    verdicts: list
    examples: dict = field(default_factory=dict)

    def report(self, catalog: Optional[Catalog] = None, allow_discovery: bool = True) -> FrequencyReport:
        catalog = catalog or default_catalog()
        counts = Counter()
        named = {}
        # discovery names are handed out in a fixed order: most frequent first
        for code, n in sorted(self.codes.items(), key=lambda t: (-t[1], t[0])):
            s = self.sigs[code]
            sig = ShapeSignature(s.V, s.E, s.F, s.face_labels, code)
            try:
                name = catalog.classify(sig, allow_discovery=allow_discovery)
            except UnknownShapeError as exc:
                raise UnknownShapeError(f"{exc} (first seen in configuration {self.examples.get(code, '?')})") from None
            counts[name] += n
            named.setdefault(name, sig)
        return FrequencyReport(self.case, self.criterion.value, dict(counts), self.n_configs, self.fvm_passing, named)


def run_enumeration(
    case: str,
    criterion="optimal",
    jobs: int = 1,
    checkpoint=None,
    verdicts: bool = False,
    progress: Optional[Callable] = None,
    max_chunks: Optional[int] = None,
) -> Enumeration:
    """Enumerate a family; resumable through ``checkpoint``.

    ``max_chunks`` stops after that many new chunks (the result is then
    partial); it exists so that long runs can be advanced in slices.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    crit = Criterion.parse(criterion) if isinstance(criterion, str) else Criterion(criterion)
    if verdicts and case == "intersection":
        raise ValueError("per-configuration verdicts are only written for the bisection cases")
    if verdicts and checkpoint is not None:
        raise ValueError("verdict files cannot be combined with checkpoints")
    ck = Checkpoint(checkpoint, case, crit) if checkpoint is not None else None
    results = dict(ck.done) if ck else {}
    todo = [(c, t) for c, t in _tasks(case, crit, verdicts) if c not in results]
    if max_chunks is not None:
        todo = todo[:max_chunks]

    def handle(r):
        results[r.chunk] = r
        if ck:
            ck.append(r)
        if progress:
            progress(len(results), r)

    if jobs <= 1:
        for _, t in todo:
            handle(_call(t))
    else:
        import multiprocessing as mp

        with mp.get_context("spawn").Pool(jobs) as pool:
            for r in pool.imap_unordered(_call, [t for _, t in todo]):
                handle(r)
    codes = Counter()
    sigs = {}
    examples = {}
    n_cfg = fvm = 0
    vlist = []
    for c in sorted(results):
        r = results[c]
        codes.update(r.codes)
        for k, s in r.sigs.items():
            sigs.setdefault(k, s)
        for k, x in r.examples.items():
            examples.setdefault(k, x)
        n_cfg += r.n_configs
        fvm += r.fvm_passing
        vlist.extend(r.verdicts)
    return Enumeration(case, crit, n_cfg, fvm, codes, sigs, vlist, examples)


def expected_configs(case: str) -> int:
    return N_AXIS**3 if case == "intersection" else 1 << N_EDGES
