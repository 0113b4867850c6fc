"""Shape signatures and the named catalog of co-spherical elements.

A signature is the canonical form of a cell's face structure: the planar
rotation system of its edge graph plus one label per face (``tri``, ``rect``,
``quad``, ``pent``, ...).  The canonical code is the lexicographically least
breadth-first encoding over every starting dart and both orientations, so it
is invariant under vertex relabeling and mirroring.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

_NGON = {3: "tri", 4: "quad", 5: "pent", 6: "hex", 7: "hept", 8: "oct"}
_LABEL_CODE = {"tri": 3, "rect": 1, "quad": 4, "pent": 5, "hex": 6, "hept": 7, "oct": 8}

PROVENANCES = ("initial-7", "bisection-17", "intersection-14", "discovered")


class UnknownShapeError(LookupError):
    pass


@dataclass(frozen=True)
class ShapeSignature:
    V: int
    E: int
    F: int
    face_labels: tuple  # sorted (label, count) pairs
    canonical_code: str  # hex

    def labels(self) -> dict:
        return dict(self.face_labels)

    def describe(self) -> str:
        lab = " ".join(f"{k}x{v}" for k, v in self.face_labels)
        return f"V={self.V} E={self.E} F={self.F} [{lab}]"


def face_label(cell, face) -> str:
    n = len(face)
    if n == 4:
        k = cell.kernel
        if all(k.metric_dot(face[i], face[(i + 1) % 4], face[(i + 1) % 4], face[(i + 2) % 4]) == 0 for i in range(4)):
            return "rect"
        return "quad"
    return _NGON.get(n, f"{n}-gon")


def _label_code(label: str) -> int:
    if label in _LABEL_CODE:
        return _LABEL_CODE[label]
    return int(label.split("-")[0])


def canonical_code(faces, labels) -> bytes:
    """Canonical encoding of a polyhedron given outward CCW face cycles."""
    left = {}
    rot = {}
    for fi, f in enumerate(faces):
        n = len(f)
        for i in range(n):
            p, u, v = f[i - 1], f[i], f[(i + 1) % n]
            left[(u, v)] = fi
            rot[(u, v)] = (u, p)
    inv = {b: a for a, b in rot.items()}
    lab = [_label_code(x) for x in labels]
    best = None
    for start in rot:
        for turn, mirror in ((rot, False), (inv, True)):
            code = _encode(start, turn, mirror, left, lab, best)
            if code is not None and (best is None or code < best):
                best = code
    return bytes(best)


def _encode(start, turn, mirror, left, lab, best):
    u0, v0 = start
    num = {u0: 0}
    order = [u0]
    ref = {u0: v0}
    out = []
    pos = 0
    bound = len(best) if best is not None else None
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        first = (x, ref[x])
        dart = first
        nbrs = []
        fl = []
        while True:
            y = dart[1]
            if y not in num:
                num[y] = len(order)
                order.append(y)
                ref[y] = x
            nbrs.append(num[y])
            fl.append(lab[left[(y, x)] if mirror else left[dart]])
            dart = turn[dart]
            if dart == first:
                break
        chunk = [len(nbrs)] + nbrs + fl
        out.extend(chunk)
        # prune: compare the prefix against the best code found so far
        if bound is not None:
            seg = best[pos : pos + len(chunk)]
            if chunk > seg:
                return None
            if chunk < seg:
                bound = None
            pos += len(chunk)
    return [len(order)] + out


def signature_from_faces(faces, labels) -> ShapeSignature:
    verts = {v for f in faces for v in f}
    E = sum(len(f) for f in faces) // 2
    code = canonical_code(faces, labels)
    counts = tuple(sorted(Counter(labels).items()))
    return ShapeSignature(len(verts), E, len(faces), counts, code.hex())


def signature(cell) -> ShapeSignature:
    labels = [face_label(cell, f) for f in cell.faces]
    return signature_from_faces(cell.faces, labels)


@dataclass
class CatalogEntry:
    name: str
    group: str
    provenance: str
    signature: ShapeSignature

    def to_json(self) -> dict:
        s = self.signature
        return {
            "name": self.name,
            "group": self.group,
            "provenance": self.provenance,
            "V": s.V,
            "E": s.E,
            "F": s.F,
            "face_labels": dict(s.face_labels),
            "canonical_code": s.canonical_code,
        }

    @classmethod
    def from_json(cls, d: dict) -> "CatalogEntry":
        sig = ShapeSignature(
            d["V"], d["E"], d["F"], tuple(sorted(d["face_labels"].items())), d["canonical_code"]
        )
        if d["provenance"] not in PROVENANCES:
            raise ValueError(f"unknown provenance {d['provenance']!r}")
        return cls(d["name"], d["group"], d["provenance"], sig)


@dataclass
class Catalog:
    entries: list = field(default_factory=list)

    def __post_init__(self):
        self._by_code = {}
        names = set()
        for e in self.entries:
            if e.name in names:
                raise ValueError(f"duplicate catalog name {e.name!r}")
            names.add(e.name)
            self._by_code[e.signature.canonical_code] = e

    def add(self, entry: CatalogEntry) -> None:
        if any(e.name == entry.name for e in self.entries):
            raise ValueError(f"duplicate catalog name {entry.name!r}")
        self.entries.append(entry)
        self._by_code[entry.signature.canonical_code] = entry

    def lookup(self, sig: ShapeSignature) -> Optional[CatalogEntry]:
        return self._by_code.get(sig.canonical_code)

    def groups(self) -> list:
        seen = []
        for e in self.entries:
            if e.group not in seen:
                seen.append(e.group)
        return seen

    def group_provenance(self, group: str) -> str:
        return next(e.provenance for e in self.entries if e.group == group)

    def classify(self, sig: ShapeSignature, allow_discovery: bool = False) -> str:
        e = self.lookup(sig)
        if e is not None:
            return e.group
        if not allow_discovery:
            raise UnknownShapeError(f"uncataloged shape {sig.describe()}")
        n = 1 + sum(1 for x in self.entries if x.provenance == "discovered")
        name = f"discovered-{n}"
        self.add(CatalogEntry(name, name, "discovered", sig))
        return name

    # -- persistence ----------------------------------------------------------
    def to_json(self) -> list:
        return [e.to_json() for e in self.entries]

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n")

    @classmethod
    def load(cls, path=None) -> "Catalog":
        if path is None:
            text = resources.files("cuboidtess.data").joinpath("catalog.json").read_text()
        else:
            text = Path(path).read_text()
        return cls([CatalogEntry.from_json(d) for d in json.loads(text)])


_DEFAULT = None


def default_catalog() -> Catalog:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = Catalog.load()
    return _DEFAULT
