import csv
import io
import json
import subprocess
import sys

import pytest

from e8cliques.cli import run


def out_of(capsys, argv, code=0):
    assert run(argv) == code
    return capsys.readouterr()


def test_roots_formats(capsys):
    text = out_of(capsys, ["roots"]).out
    assert "coordinates: doubled" in text
    rows = list(csv.reader(io.StringIO(out_of(capsys, ["roots", "--format", "csv"]).out)))
    assert rows[0][0] == "index" and len(rows) == 241
    assert rows[1][1:] == ["-1"] * 8
    data = json.loads(out_of(capsys, ["roots", "--format", "json"]).out)
    assert len(data["rows"]) == 240 and data["rows"][-1]["x1"] == 2


def test_stats(capsys):
    data = json.loads(out_of(capsys, ["stats", "--colors", "-1,0", "--format", "json"]).out)
    assert {r["color"]: r["neighbors"] for r in data["rows"]} == {1: 56, 0: 126, -1: 56, -2: 1}
    assert data["degrees"] == {"182": 240}


def test_faces(capsys):
    rows = list(csv.DictReader(io.StringIO(out_of(capsys, ["faces", "--format", "csv"]).out)))
    assert len(rows) == 8
    assert all(r["count"] == r["expected"] for r in rows)


def test_enum_k_cliques(capsys):
    data = json.loads(out_of(capsys, ["enum", "--colors", "0", "--size", "2,3", "--format", "json"]).out)
    assert {r["size"]: r["count"] for r in data["rows"]} == {2: 15120, 3: 302400}


def test_enum_maximal_histogram(capsys):
    text = out_of(capsys, ["enum", "--colors", "-2,-1,1", "--seed", "1", "--maximal", "--format", "json"]).out
    assert json.loads(text) == {"6": 28, "14": 2016, "16": 576}


def test_enum_stream(tmp_path, capsys):
    path = tmp_path / "cl.txt"
    out_of(capsys, ["enum", "--colors", "-2,0", "--seed", "1,8", "--maximal", "--stream", str(path)])
    lines = path.read_text().splitlines()
    assert lines and all(len(line.split()) == 16 for line in lines)


def test_enum_checkpoint_resume_is_identical(tmp_path, capsys):
    ck = tmp_path / "ck.jsonl"
    argv = ["enum", "--colors", "-2,-1,0", "--seed", "1,8", "--maximal", "--checkpoint", str(ck)]
    first = out_of(capsys, argv)
    again = out_of(capsys, argv)
    assert first.out == again.out
    assert "resumed" in again.err


def test_orbits_single_orbit(capsys):
    data = json.loads(out_of(capsys, ["orbits", "--colors", "-2,0", "--maximal", "--format", "json"]).out)
    (row,) = data["rows"]
    assert row["|K|"] == 16 and row["|W_K|"] == 344064 and row["#O"] == 1 and row["members"] == 2025
    assert data["all_certified"]


def test_census_verify(capsys):
    res = out_of(capsys, ["census-verify", "--colors", "-2,-1,0", "--seed", "1,8", "--size", "16"])
    assert "ok: True" in res.out


def test_census_verify_needs_seed(capsys):
    assert run(["census-verify", "--colors", "0", "--size", "4"]) == 2


def test_conjugate(capsys):
    res = out_of(capsys, ["conjugate", "--seq", "1,8", "--seq", "8,1", "--format", "csv"])
    assert res.out.splitlines()[1].endswith(",1")
    res = out_of(capsys, ["conjugate", "--seq", "1,8", "--seq", "1,2", "--sets", "--format", "csv"])
    assert res.out.splitlines()[1].startswith("sets,")
    assert run(["conjugate", "--seq", "1,8"]) == 2


def test_extend(capsys):
    text = out_of(capsys, ["extend", "--map", "1:1,8:8", "--format", "json"]).out
    data = json.loads(text)
    assert data["extends"] and len(data["permutation"]) == 240
    data = json.loads(out_of(capsys, ["extend", "--map", "1:1,8:2", "--format", "json"]).out)
    assert data["extends"] is False and data["pairs"] == [[1, 1], [8, 2]]  # 1.8 = 0 but 1.2 = 1


def test_stabilizer(capsys):
    data = json.loads(out_of(capsys, ["stabilizer", "--seed", "240", "--format", "json"]).out)
    (row,) = data["rows"]
    assert row["|W_K|"] == 2903040 and row["orbit"] == 240


def test_usage_errors(capsys):
    assert run(["enum", "--colors", "0"]) == 2
    assert run(["orbits", "--size", "3"]) == 2
    assert run(["stats", "--workers", "0"]) == 2
    with pytest.raises(SystemExit):
        run(["enum", "--colors", "5"])


def test_budget_exit_code(capsys):
    assert run(["enum", "--colors", "0,1", "--maximal", "--tier", "fast"]) == 3


def test_out_file(tmp_path, capsys):
    path = tmp_path / "faces.csv"
    assert run(["faces", "--format", "csv", "--out", str(path)]) == 0
    assert path.read_text().startswith("face,count,expected")
    assert capsys.readouterr().out == ""


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "e8cliques", "stabilizer", "--seed", "1,8"], capture_output=True, text=True)
    assert res.returncode == 0 and "46080" in res.stdout
