"""Regeneration of the shape catalog from enumeration results.

Element names are bound to canonical codes by a deterministic rule:

* element rows are processed in file order; a row may constrain V, E, F and
  the face-label multiset;
* rows of the first two provenance groups draw from the codes seen in the
  cube family (then the other bisection families), intersection rows from
  codes seen only in the intersection family;
* among the unbound matching codes the one whose frequency is closest to the
  element's reference frequency wins, ties going to the smaller code;
* a row with no matching observed shape is left out (and reported);
* every code left over becomes ``discovered-N``, numbered by family
  (A, B, C, intersection), then by descending frequency, then by code.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .catalog import Catalog, CatalogEntry, ShapeSignature

FAMILIES = ("A", "B", "C", "intersection")


@dataclass(frozen=True)
class ElementRow:
    name: str
    provenance: str
    V: int
    E: int
    F: int
    labels: Optional[tuple]  # sorted (label, count) pairs, or None for any

    def matches(self, sig: ShapeSignature) -> bool:
        if (sig.V, sig.E, sig.F) != (self.V, self.E, self.F):
            return False
        return self.labels is None or tuple(sorted(sig.face_labels)) == self.labels


def parse_labels(text: str) -> Optional[tuple]:
    text = text.strip()
    if not text:
        return None
    out = []
    for part in text.split():
        lab, n = part.split(":")
        out.append((lab, int(n)))
    return tuple(sorted(out))


def format_labels(pairs) -> str:
    return " ".join(f"{lab}:{n}" for lab, n in sorted(pairs))


def _data_text(name: str) -> str:
    return resources.files("cuboidtess.data").joinpath(name).read_text()


def _rows(text: str) -> list:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return list(csv.DictReader(lines))


def load_elements(text: Optional[str] = None) -> list:
    rows = _rows(text if text is not None else _data_text("elements.csv"))
    return [ElementRow(r["name"], r["provenance"], int(r["V"]), int(r["E"]), int(r["F"]), parse_labels(r["labels"])) for r in rows]


# -- observed codes -----------------------------------------------------------------


@dataclass(frozen=True)
class Observed:
    family: str
    code: str
    count: int
    signature: ShapeSignature


def observed_from(family: str, codes: dict, sigs: dict) -> list:
    out = []
    for code, n in codes.items():
        s = sigs[code]
        out.append(Observed(family, code, int(n), ShapeSignature(s.V, s.E, s.F, tuple(sorted(s.face_labels)), code)))
    return sorted(out, key=lambda o: (-o.count, o.code))


def write_observed(obs: list, path) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["family", "code", "count", "V", "E", "F", "labels"])
    for o in sorted(obs, key=lambda o: (FAMILIES.index(o.family), -o.count, o.code)):
        s = o.signature
        w.writerow([o.family, o.code, o.count, s.V, s.E, s.F, format_labels(s.face_labels)])
    Path(path).write_text(buf.getvalue())


def load_observed(path=None) -> list:
    text = Path(path).read_text() if path is not None else _data_text("observed_codes.csv")
    out = []
    for r in _rows(text):
        sig = ShapeSignature(int(r["V"]), int(r["E"]), int(r["F"]), parse_labels(r["labels"]) or (), r["code"])
        out.append(Observed(r["family"], r["code"], int(r["count"]), sig))
    return out


# -- binding ------------------------------------------------------------------------


def build_catalog(elements: list, observed: list, references: dict) -> tuple:
    """Bind element names to observed codes.

    ``references`` maps provenance group to a ``{name: count}`` table used to
    pick among several matching codes.  Returns ``(catalog, unmatched rows)``.
    """
    by_family = {f: {} for f in FAMILIES}
    for o in observed:
        by_family[o.family][o.code] = o
    bisection_codes = set(by_family["A"]) | set(by_family["B"]) | set(by_family["C"])
    bound = {}
    entries = []
    used_names = Counter()
    unmatched = []
    for row in elements:
        if row.provenance == "intersection-14":
            pools = [{c: o for c, o in by_family["intersection"].items() if c not in bisection_codes}]
        else:
            merged = {}
            for fam in ("B", "C", "intersection"):
                for c, o in by_family[fam].items():
                    merged.setdefault(c, o)
            pools = [by_family["A"], merged]
        ref = references.get(row.provenance, {}).get(row.name, 0)
        choice = None
        for pool in pools:
            cands = [o for c, o in pool.items() if c not in bound and row.matches(o.signature)]
            if cands:
                choice = min(cands, key=lambda o: (abs(o.count - ref), o.code))
                break
        if choice is None:
            unmatched.append(row)
            continue
        used_names[row.name] += 1
        name = row.name if used_names[row.name] == 1 else f"{row.name} ({format_labels(choice.signature.face_labels)})"
        bound[choice.code] = name
        entries.append(CatalogEntry(name, row.name, row.provenance, choice.signature))
    n = 0
    for fam in FAMILIES:
        for o in sorted(by_family[fam].values(), key=lambda o: (-o.count, o.code)):
            if o.code in bound:
                continue
            n += 1
            name = f"discovered-{n}"
            bound[o.code] = name
            entries.append(CatalogEntry(name, name, "discovered", o.signature))
    return Catalog(entries), unmatched


def reference_tables() -> dict:
    from .report import golden_path, load_golden

    cube = load_golden(golden_path("A_optimal.csv"))
    inter = load_golden(golden_path("intersection_optimal.csv"))
    return {"initial-7": cube, "bisection-17": cube, "intersection-14": inter}


def regenerate(jobs: int = 1, intersection_checkpoint=None, observed_out=None, catalog_out=None) -> tuple:
    """Recompute the bisection families and rebuild the catalog.

    Intersection codes come from a finished checkpoint when given, otherwise
    from the shipped observation table.  Returns ``(catalog, unmatched rows)``.
    """
    from .report import run_enumeration

    observed = []
    for fam in ("A", "B", "C"):
        e = run_enumeration(fam, "optimal", jobs=jobs)
        observed += observed_from(fam, e.codes, e.sigs)
    if intersection_checkpoint is not None:
        e = run_enumeration("intersection", "optimal", jobs=jobs, checkpoint=intersection_checkpoint)
        observed += observed_from("intersection", e.codes, e.sigs)
    else:
        observed += [o for o in load_observed() if o.family == "intersection"]
    catalog, unmatched = build_catalog(load_elements(), observed, reference_tables())
    if observed_out is not None:
        write_observed(observed, observed_out)
    if catalog_out is not None:
        catalog.save(catalog_out)
    return catalog, unmatched
