"""``tess`` command-line interface.

Exit codes: 0 ok, 1 golden mismatch, 2 input error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class InputError(Exception):
    pass


def _criterion(text: str):
    from .criteria import Criterion

    try:
        return Criterion.parse(text)
    except ValueError:
        raise InputError(f"unknown criterion {text!r} (use optimal, faces or edges)") from None


def _cmd_tessellate(args) -> int:
    from .catalog import default_catalog
    from .configs import ConfigError, parse_config, parse_dims
    from .export import export_mesh
    from .fvm import config_verdict
    from .report import final_cells, tessellate_config

    crit = _criterion(args.criterion)
    try:
        dims = parse_dims(args.dims) if args.dims else None
        cfg = parse_config(args.config, dims)
    except (ConfigError, ValueError) as exc:
        raise InputError(str(exc)) from None
    catalog = default_catalog()
    cx = tessellate_config(cfg)
    elements = [(catalog.classify(sig, allow_discovery=True), cell) for sig, cell in final_cells(cx, crit, catalog)]
    verdict = config_verdict(cfg.ident(), cx.cells, cfg.dims)
    counts = Counter(name for name, _ in elements)
    print(f"# configuration {cfg.text()}")
    print(f"# criterion {crit.value}; cells {len(cx.cells)}; elements {len(elements)}")
    print(f"# circumcenter-inside {int(verdict.ok)} (failing cells {verdict.n_failing})")
    print("name,count")
    for name, n in sorted(counts.items(), key=lambda t: (-t[1], t[0])):
        print(f"{name},{n}")
    if args.export:
        default = f"tess-{cfg.mask:03x}" if cfg.ident() == f"{cfg.mask:03x}" else "tess-config"
        prefix = args.out or default
        try:
            main, side = export_mesh(elements, cx.kernel, args.export, prefix, title=cfg.text())
        except OSError as exc:
            raise InputError(f"cannot write export: {exc}") from None
        print(f"# wrote {main} and {side}", file=sys.stderr)
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    from .fvm import write_verdicts
    from .report import CASES, compare_golden, load_golden, run_enumeration

    case = args.case if args.case == "intersection" else args.case.upper()
    if case not in CASES:
        raise InputError(f"unknown case {args.case!r}")
    crit = _criterion(args.criterion)
    golden = None
    if args.golden:
        try:
            golden = load_golden(args.golden)
        except (OSError, ValueError) as exc:
            raise InputError(str(exc)) from None
    if args.jobs < 1:
        raise InputError("--jobs must be positive")

    def progress(done, _r):
        if args.progress:
            print(f"# chunks done: {done}", file=sys.stderr)

    try:
        enum = run_enumeration(case, crit, jobs=args.jobs, checkpoint=args.checkpoint, verdicts=bool(args.verdicts), progress=progress)
    except ValueError as exc:
        # checkpoint from another run, verdicts for the intersection family, ...
        if "checkpoint" in str(exc) or "verdict" in str(exc):
            raise InputError(str(exc)) from None
        raise
    report = enum.report(allow_discovery=args.discover)
    text = report.to_csv()
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.verdicts:
        write_verdicts(enum.verdicts, args.verdicts)
    if golden is not None:
        diff = compare_golden(report, golden)
        if diff:
            print(f"# golden mismatch: {len(diff)} name(s) differ", file=sys.stderr)
            for name, want, got in diff:
                print(f"{name}: expected {want}, got {got} ({got - want:+d})", file=sys.stderr)
            return EXIT_MISMATCH
        print("# golden table matches", file=sys.stderr)
    return EXIT_OK


def _cmd_catalog(args) -> int:
    from .catalog import Catalog, default_catalog

    if args.regenerate:
        from importlib import resources

        from .catalog_build import regenerate

        data = Path(str(resources.files("cuboidtess.data")))
        out = Path(args.out) if args.out else data / "catalog.json"
        obs = Path(args.observed_out) if args.observed_out else (data / "observed_codes.csv" if not args.out else None)
        cat, unmatched = regenerate(jobs=args.jobs, intersection_checkpoint=args.intersection_checkpoint, observed_out=obs, catalog_out=out)
        print(f"# wrote {out} ({len(cat.entries)} entries)", file=sys.stderr)
        for row in unmatched:
            print(f"# no observed shape for element {row.name} (V={row.V} E={row.E} F={row.F})", file=sys.stderr)
        return EXIT_OK
    cat = Catalog.load(args.out) if args.out else default_catalog()
    print("name,group,provenance,V,E,F,face_labels")
    for e in cat.entries:
        s = e.signature
        labels = " ".join(f"{k}:{v}" for k, v in s.face_labels)
        print(f"{e.name},{e.group},{e.provenance},{s.V},{s.E},{s.F},{labels}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tess", description="Exact co-spherical tessellation of 1-irregular cuboids.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tessellate", help="tessellate one configuration")
    t.add_argument("--config", required=True, help="'dims=a,b,c;edges=f0,...,f11' or a 12-bit hex mask")
    t.add_argument("--dims", help="cuboid edge lengths a,b,c (e.g. 1,sqrt2,sqrt2); default 1,1,1")
    t.add_argument("--criterion", default="optimal")
    t.add_argument("--export", choices=("off", "vtk"))
    t.add_argument("--out", help="output prefix for --export")
    t.set_defaults(func=_cmd_tessellate)

    e = sub.add_parser("enumerate", help="enumerate a configuration family")
    e.add_argument("--case", required=True, help="A, B, C or intersection")
    e.add_argument("--criterion", default="optimal")
    e.add_argument("--golden", help="reference name,count table to verify against")
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--checkpoint", help="append-only partial-sums file (resumes if present)")
    e.add_argument("--verdicts", help="write the per-configuration circumcenter verdict CSV here")
    e.add_argument("--output", help="write the report here instead of stdout")
    e.add_argument("--discover", action="store_true", help="name uncataloged shapes instead of failing")
    e.add_argument("--progress", action="store_true")
    e.set_defaults(func=_cmd_enumerate)

    c = sub.add_parser("catalog", help="show or regenerate the shape catalog")
    c.add_argument("--regenerate", action="store_true")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--intersection-checkpoint", help="finished intersection checkpoint to take codes from")
    c.add_argument("--out", help="catalog path (default: the packaged catalog)")
    c.add_argument("--observed-out", help="where to write the observed-code table")
    c.set_defaults(func=_cmd_catalog)
    return p


def main(argv=None) -> int:
    from .catalog import UnknownShapeError
    from .criteria import SplitError
    from .delaunay import DelaunayError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"tess: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DelaunayError, SplitError, UnknownShapeError, RuntimeError, AssertionError) as exc:
        print(f"tess: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
