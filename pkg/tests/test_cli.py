import json

import pytest

from trioscillator import __version__
from trioscillator.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def data_rows(text):
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    return lines[0], [l.split(",") for l in lines[1:]]


def test_eval_example(capsys):
    code, out, _ = run(capsys, "eval", "--family", "rahman", "--N", "2", "--m", "1", "--n", "0",
                       "--params", "2,1,1,1", "--mode", "exact", "--format", "csv")
    assert code == 0
    header, rows = data_rows(out)
    assert header == "x,y,re,im" and len(rows) == 6
    assert [r for r in rows if r[:2] == ["1", "0"]][0][2] == "11/20"
    meta = json.loads(out.splitlines()[0][2:])
    assert meta["version"] == __version__ and meta["mode"] == "exact" and meta["seed"] == 0
    assert meta["params"] == {"p1": "2", "p2": "1", "p3": "1", "p4": "1"}


def test_eval_json_and_files_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["eval", "--family", "tratnik", "--N", "3", "--m", "1", "--n", "1",
                     "--params", "3,1,2,5", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert len(data["values"]) == 10 and data["family"] == "tratnik"


def test_eval_weight_float(capsys):
    code, out, _ = run(capsys, "eval", "--family", "weight", "--N", "3", "--params", "1,2,3,4", "--mode", "float")
    _, rows = data_rows(out)
    assert code == 0 and sum(float(r[2]) for r in rows) == pytest.approx(1.0)


def test_mode_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("TRIOSCILLATOR_MODE", "0")
    code, out, _ = run(capsys, "eval", "--family", "rahman", "--N", "2", "--m", "1", "--n", "0",
                       "--params", "2,1,1,1")
    assert code == 0 and '"mode": "float"' in out and "0.55" in out
    monkeypatch.setenv("TRIOSCILLATOR_MODE", "fast")
    assert run(capsys, "eval", "--family", "weight", "--N", "1", "--params", "2,1,1,1")[0] == 2


def test_spectrum_iso(capsys):
    code, out, _ = run(capsys, "spectrum", "--iso", "--N", "2", "--params", "2,1,1,1")
    assert code == 0
    lines = out.strip().splitlines()
    assert [l.split()[:2] for l in lines] == [["0", "x1"], ["1", "x2"], ["2", "x3"]]
    assert all(l.endswith("residual=0") for l in lines)


def test_spectrum_aniso_json(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, _, _ = run(capsys, "spectrum", "--aniso", "--omega-sq", "1,2", "--N", "2", "--params", "2,1,1,1",
                     "--out", str(out))
    data = json.loads(out.read_text())
    levels = [lv for r in data["levels"] for lv in [r["level"]] * r["multiplicity"]]
    assert code == 0 and levels == ["0", "1", "2", "2", "3", "4"]
    assert data["params"]["omega2_sq"] == "2"
    assert run(capsys, "spectrum", "--aniso", "--N", "2", "--params", "2,1,1,1")[0] == 2


def test_spectrum_iso_n3_multiplicities(capsys):
    _, out, _ = run(capsys, "spectrum", "--iso", "--N", "3", "--params", "3,1,2,5", "--mode", "float")
    assert [l.split()[1] for l in out.strip().splitlines()] == ["x1", "x2", "x3", "x4"]


def test_operator_export(tmp_path, capsys):
    path = tmp_path / "jy.csv"
    code, out, _ = run(capsys, "operator", "--kind", "a-minus-r", "--N", "3", "--params", "2,1,1,1",
                       "--export", str(path))
    assert code == 0 and "T_3 -> T_2" in out
    header, rows = data_rows(path.read_text())
    assert header == "row,col,re,im" and rows
    assert all(0 <= int(r[0]) < 6 and 0 <= int(r[1]) < 10 for r in rows)
    assert run(capsys, "operator", "--kind", "haniso", "--N", "2", "--params", "2,1,1,1")[0] == 2
    assert run(capsys, "operator", "--kind", "haniso", "--N", "2", "--params", "2,1,1,1", "--omega", "1,2")[0] == 0


def test_verify(tmp_path, capsys):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--suite", "all", "--N", "3", "--params", "2,1,1,1", "--mode", "exact",
                       "--report", str(report))
    assert code == 0 and "47/47 passed" in out
    data = json.loads(report.read_text())
    assert data["pass"] and data["version"] == __version__ and len(data["cases"]) == 47


def test_verify_random_and_failure_exit(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "su2", "--N", "2", "--params", "2,1,1,1",
                       "--random", "2", "--seed", "11")
    assert code == 0 and "over 3 parameter sets" in out
    code, out, _ = run(capsys, "verify", "--suite", "eigen-rahman", "--N", "8", "--params", "3,1,2,5",
                       "--mode", "float", "--tolerance", "1e-30")
    assert code == 1 and "FAIL" in out


def test_limit(tmp_path, capsys):
    path = tmp_path / "rec.csv"
    code, out, _ = run(capsys, "limit", "--check", "hermite", "--m", "1", "--n", "1", "--params", "2,1,1,1",
                       "--N-list", "64,256", "--out", str(path))
    assert code == 0 and "monotone=True" in out
    header, rows = data_rows(path.read_text())
    assert header == "N,max_error,est_order" and [r[0] for r in rows] == ["64", "256"]
    code, out, _ = run(capsys, "limit", "--check", "operator", "--which", "L2", "--testfn", "s*t",
                       "--params", "1,2,3,4", "--N-list", "64,256,1024", "--format", "json",
                       "--out", str(tmp_path / "r.json"))
    assert code == 0 and json.loads((tmp_path / "r.json").read_text())["monotone"]


@pytest.mark.parametrize("argv", [
    ["eval", "--family", "rahman", "--N", "2", "--m", "1", "--n", "0", "--params", "1,1,1,1"],
    ["eval", "--family", "rahman", "--N", "2", "--m", "3", "--n", "0", "--params", "2,1,1,1"],
    ["eval", "--family", "rahman", "--N", "2", "--params", "2,1,1,1"],
    ["limit", "--check", "hermite", "--m", "1", "--params", "2,1,1,1", "--N-list", "8", "--radius", "9"],
    ["limit", "--check", "operator", "--testfn", "s^5", "--params", "2,1,1,1"],
    ["verify", "--suite", "all", "--N", "20", "--params", "2,1,1,1", "--mode", "exact"],
    ["eval", "--family", "weight", "--N", "2", "--params-file", "/nonexistent/p.json"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error:" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--family", "rahman", "--N", "2"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["eval", "--family", "rahman", "--N", "2", "--params", "2,1,1,1", "--params-file", "x"])
