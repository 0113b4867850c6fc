"""Mesh export: OFF and legacy VTK polygon files plus a sidecar CSV.

Every final element is written as its own closed polygon set, so a face
shared by two elements appears twice.  The sidecar CSV maps elements to
catalog names and to their face range in the main file.  Coordinates are
exact values rendered to decimal with 30 significant digits.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .exact import as_exact

DIGITS = 30


def _num(x) -> str:
    d = as_exact(x).to_decimal(DIGITS)
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _collect(elements, kernel):
    """Shared vertex list and per-element face lists (in global vertex ids)."""
    used = sorted({v for _, cell in elements for f in cell.faces for v in f})
    index = {v: i for i, v in enumerate(used)}
    verts = [kernel.point(v) for v in used]
    faces = []
    spans = []
    for name, cell in elements:
        start = len(faces)
        faces.extend(tuple(index[v] for v in f) for f in cell.faces)
        spans.append((name, cell, start, len(cell.faces)))
    return verts, faces, spans


def write_off(path, verts, faces) -> None:
    lines = ["OFF", f"{len(verts)} {len(faces)} 0"]
    lines += [" ".join(_num(c) for c in p) for p in verts]
    lines += [" ".join(str(x) for x in (len(f),) + f) for f in faces]
    Path(path).write_text("\n".join(lines) + "\n")


def write_vtk(path, verts, faces, spans, title: str) -> None:
    n_entries = sum(len(f) + 1 for f in faces)
    lines = ["# vtk DataFile Version 3.0", title[:255], "ASCII", "DATASET POLYDATA"]
    lines.append(f"POINTS {len(verts)} double")
    lines += [" ".join(_num(c) for c in p) for p in verts]
    lines.append(f"POLYGONS {len(faces)} {n_entries}")
    lines += [" ".join(str(x) for x in (len(f),) + f) for f in faces]
    lines.append(f"CELL_DATA {len(faces)}")
    lines.append("SCALARS element int 1")
    lines.append("LOOKUP_TABLE default")
    for i, (_, _, _, nf) in enumerate(spans):
        lines += [str(i)] * nf
    Path(path).write_text("\n".join(lines) + "\n")


def write_sidecar(path, spans) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["element", "name", "first_face", "n_faces", "vertices"])
        for i, (name, cell, start, nf) in enumerate(spans):
            w.writerow([i, name, start, nf, len(cell.vertices)])


def export_mesh(elements, kernel, fmt: str, prefix, title: str = "cuboid tessellation") -> tuple:
    """Write ``prefix.off`` / ``prefix.vtk`` and ``prefix.cells.csv``; return both paths.

    ``elements`` is a list of ``(name, cell)`` pairs.
    """
    fmt = fmt.lower()
    if fmt not in ("off", "vtk"):
        raise ValueError(f"unknown export format {fmt!r}")
    prefix = Path(prefix)
    verts, faces, spans = _collect(elements, kernel)
    main = prefix.with_name(prefix.name + "." + fmt)
    side = prefix.with_name(prefix.name + ".cells.csv")
    if fmt == "off":
        write_off(main, verts, faces)
    else:
        write_vtk(main, verts, faces, spans, title)
    write_sidecar(side, spans)
    return main, side
