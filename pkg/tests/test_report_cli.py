import json

import pytest

from cuboidtess.cli import EXIT_INPUT, EXIT_MISMATCH, EXIT_OK, main
from cuboidtess.report import (
    BISECTION_CHUNK,
    Checkpoint,
    FrequencyReport,
    GoldenFormatError,
    compare_golden,
    golden_path,
    load_golden,
    run_enumeration,
)


def test_shipped_golden_tables_parse():
    a = load_golden(golden_path("A_optimal.csv"))
    assert len(a) == 24 and sum(a.values()) == 37259
    assert a["Tetrahedron"] == 18450


@pytest.mark.parametrize(
    "text",
    ["name,number\nCuboid,1\n", "name,count\nCuboid,1\nCuboid,2\n", "name,count\nCuboid,x\n", "name,count\nCuboid\n"],
)
def test_malformed_golden_tables(tmp_path, text):
    p = tmp_path / "g.csv"
    p.write_text(text)
    with pytest.raises(GoldenFormatError):
        load_golden(p)


def test_compare_golden_reports_both_directions():
    rep = FrequencyReport("A", "optimal", {"Cuboid": 2, "Tetrahedron": 5}, 1, 1)
    assert compare_golden(rep, {"Cuboid": 2, "Tetrahedron": 5}) == []
    diff = compare_golden(rep, {"Cuboid": 3, "Prism": 1})
    assert sorted(diff) == [("Cuboid", 3, 2), ("Prism", 1, 0), ("Tetrahedron", 0, 5)]


def test_report_csv_layout():
    rep = FrequencyReport("B", "faces", {"Tetrahedron": 5, "Cuboid": 5, "Prism": 9}, 7, 3)
    lines = rep.to_csv().splitlines()
    assert lines[:4] == ["# case B, criterion faces", "# configurations 7, circumcenter-inside 3", "# grand total 19", "name,count"]
    assert lines[4:] == ["Prism,9", "Cuboid,5", "Tetrahedron,5"]


def test_tessellate_empty_config_off(tmp_path, capsys):
    prefix = tmp_path / "cube"
    assert main(["tessellate", "--config", "0x000", "--export", "off", "--out", str(prefix)]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[-2:] == ["name,count", "Cuboid,1"]
    off = (tmp_path / "cube.off").read_text().split("\n")
    assert off[0] == "OFF" and off[1] == "8 6 0"
    coords = {tuple(line.split()) for line in off[2:10]}
    assert coords == {(x, y, z) for x in "01" for y in "01" for z in "01"}
    assert all(line.split()[0] == "4" for line in off[10:16])
    side = (tmp_path / "cube.cells.csv").read_text().splitlines()
    assert side == ["element,name,first_face,n_faces,vertices", "0,Cuboid,0,6,8"]


def test_tessellate_vtk_structure(tmp_path, capsys):
    prefix = tmp_path / "mid"
    args = ["tessellate", "--config", "dims=1,sqrt2,sqrt2;edges=1/2,-,-,-,-,-,-,-,-,-,-,1/4"]
    assert main(args + ["--export", "vtk", "--out", str(prefix)]) == EXIT_OK
    capsys.readouterr()
    lines = (tmp_path / "mid.vtk").read_text().splitlines()
    assert lines[0] == "# vtk DataFile Version 3.0" and lines[2] == "ASCII" and lines[3] == "DATASET POLYDATA"
    n_pts = int(lines[4].split()[1])
    assert n_pts == 10
    assert lines[5 + 3].split()[1] == "1.41421356237309504880168872421"
    head = lines[5 + n_pts].split()
    assert head[0] == "POLYGONS"
    n_faces, n_entries = int(head[1]), int(head[2])
    polys = [list(map(int, ln.split())) for ln in lines[6 + n_pts : 6 + n_pts + n_faces]]
    assert sum(len(p) for p in polys) == n_entries
    assert all(p[0] == len(p) - 1 and max(p[1:]) < n_pts for p in polys)
    rest = lines[6 + n_pts + n_faces :]
    assert rest[:3] == [f"CELL_DATA {n_faces}", "SCALARS element int 1", "LOOKUP_TABLE default"]
    ids = list(map(int, rest[3:]))
    side = (tmp_path / "mid.cells.csv").read_text().splitlines()[1:]
    assert len(ids) == n_faces and max(ids) == len(side) - 1


@pytest.mark.parametrize(
    "argv",
    [
        ["tessellate", "--config", "0x1000"],
        ["tessellate", "--config", "dims=1,1,1;edges=3/2,-,-,-,-,-,-,-,-,-,-,-"],
        ["tessellate", "--config", "dims=1,1,1;edges=1/2,-"],
        ["tessellate", "--config", "0x001", "--criterion", "coarsest"],
        ["enumerate", "--case", "D"],
        ["enumerate", "--case", "A", "--jobs", "0"],
        ["frobnicate"],
    ],
)
def test_input_errors_exit_2(argv, capsys):
    assert main(argv) == EXIT_INPUT


def test_malformed_golden_exits_2(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text("name,count\nCuboid,many\n")
    assert main(["enumerate", "--case", "A", "--golden", str(p)]) == EXIT_INPUT


def test_checkpoint_resume_and_golden_cli(tmp_path, capsys):
    ck = tmp_path / "a.jsonl"
    partial = run_enumeration("A", checkpoint=ck, max_chunks=5)
    assert partial.n_configs == 5 * BISECTION_CHUNK
    # a torn final line from an interrupted write is ignored on resume
    with open(ck, "a") as fh:
        fh.write('{"chunk": 9, "configs"')
    assert len(Checkpoint(ck, "A", "optimal").done) == 5
    assert ck.read_text().endswith("}\n")

    fresh = []
    full = run_enumeration("A", checkpoint=ck, progress=lambda n, r: fresh.append(r.chunk))
    assert 0 not in fresh and len(fresh) == 16 - 5
    assert full.n_configs == 4096 and full.fvm_passing == 4096
    assert len(Checkpoint(ck, "A", "optimal").done) == 16
    ref = full.report()
    golden = tmp_path / "ours.csv"
    golden.write_text(ref.to_csv())
    out = tmp_path / "report.csv"
    args = ["enumerate", "--case", "A", "--checkpoint", str(ck), "--golden", str(golden), "--output", str(out)]
    assert main(args) == EXIT_OK
    assert out.read_text() == ref.to_csv()
    capsys.readouterr()

    name, n = ref.rows()[0]
    golden.write_text(ref.to_csv().replace(f"{name},{n}", f"{name},{n + 1}"))
    assert main(args) == EXIT_MISMATCH
    err = capsys.readouterr().err
    assert f"{name}: expected {n + 1}, got {n} (-1)" in err


def test_checkpoint_rejects_other_runs(tmp_path):
    ck = tmp_path / "b.jsonl"
    ck.write_text(json.dumps({"case": "C", "criterion": "optimal", "n_chunks": 16}) + "\n")
    with pytest.raises(ValueError):
        run_enumeration("A", checkpoint=ck, max_chunks=0)


def test_worker_count_does_not_change_results():
    one = run_enumeration("B", "faces", jobs=1, max_chunks=3)
    two = run_enumeration("B", "faces", jobs=2, max_chunks=3)
    assert one.report().to_csv() == two.report().to_csv()


def test_verdict_file(tmp_path, capsys):
    v = tmp_path / "v.csv"
    out = tmp_path / "r.csv"
    assert main(["enumerate", "--case", "B", "--verdicts", str(v), "--output", str(out)]) == EXIT_OK
    rows = v.read_text().splitlines()
    assert rows[0] == "config,ok,n_failing" and len(rows) == 4097
    passing = sum(r.split(",")[1] == "1" for r in rows[1:])
    assert f"circumcenter-inside {passing}" in out.read_text()


def test_catalog_listing(capsys):
    assert main(["catalog"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "name,group,provenance,V,E,F,face_labels"
    assert "Cuboid,Cuboid,initial-7,8,12,6,rect:6" in lines
