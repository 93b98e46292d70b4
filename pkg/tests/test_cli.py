import json
from pathlib import Path

import pytest

from hspan.cli import main
from hspan.domain import disk
from hspan.errors import SolveFailure

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


@pytest.fixture
def disk_file(tmp_path):
    p = tmp_path / "disk.json"
    p.write_text(json.dumps(disk(1.0, 0.0, 0.0, 0.5).to_json()))
    return str(p)


def test_span_disk(disk_file, capsys, tmp_path):
    out = tmp_path / "out"
    assert main(["span", disk_file, "--emit", "json,svg", "--out", str(out)]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["span"] == pytest.approx(0.575364145, abs=1e-8)
    assert res["identity_residual"] < 1e-9
    assert res["slits"][0]["circular"]["radius"] == pytest.approx(2.0)
    assert json.loads((out / "span.json").read_text()) == res
    assert (out / "slits.svg").read_text().startswith("<?xml")


def test_span_multiply_connected_has_no_distance(capsys):
    assert main(["span", str(DATA / "two_connected.json"), "--nodes", "128"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["connectivity"] == 2 and "poincare_distance" not in res
    assert len(res["slits"]) == 2


def test_output_is_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert main(["span", str(DATA / "two_connected.json"), "--emit", "json,svg",
                     "--out", str(d)]) == 0
        outs.append(d)
    for name in ("span.json", "slits.svg"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_bad_inputs_exit_2(tmp_path, capsys):
    assert main(["span", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"curves": [{"coeffs": [[1, 1, 0]]}], "a": [0, 0], "b": [0, 0]}))
    assert main(["span", str(bad)]) == 2
    assert "marked points coincide" in capsys.readouterr().err
    fam = tmp_path / "fam.json"
    fam.write_text(json.dumps({"phi": "abs2(z) - 1 +", "curves": [{"coeffs_t": [[1, "1", "0"]]}]}))
    assert main(["scan", str(fam), "--grid", "1", "--out", str(tmp_path)]) == 2
    assert main(["scan", "no_such_family", "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["span", str(bad), "--nodes", "15"])


def test_too_close_is_bad_input(tmp_path, capsys):
    p = tmp_path / "close.json"
    p.write_text(json.dumps(disk(1.0, 0.0, 0.0, 0.01).to_json()))
    assert main(["span", str(p)]) == 2
    assert "hspan:" in capsys.readouterr().err


def test_solver_failure_exit_3(disk_file, monkeypatch, capsys):
    import hspan.principal

    def boom(*args, **kwargs):
        raise SolveFailure("matrix is singular to working precision")

    monkeypatch.setattr(hspan.principal, "compute_principal_pair", boom)
    assert main(["span", disk_file]) == 3
    assert "SolveFailure" in capsys.readouterr().err


def test_scan_writes_outputs(tmp_path, capsys):
    out = tmp_path / "scan"
    code = main(["scan", "hartogs", "--grid", "3", "--radius", "0.1", "--nodes", "128",
                 "--emit", "csv,json,svg", "--out", str(out)])
    assert code == 0
    verdict = json.loads((out / "verdict.json").read_text())
    assert verdict["span_subharmonic"] and verdict["pseudoconvex"]
    lines = (out / "scan.csv").read_text().splitlines()
    assert len(lines) == 1 + 5
    assert (out / "scan_span.svg").exists() and (out / "slits.svg").exists()


def test_scan_family_file(tmp_path, capsys):
    assert main(["scan", str(DATA / "hartogs.json"), "--grid", "1", "--nodes", "128",
                 "--out", str(tmp_path)]) == 0
    assert json.loads(capsys.readouterr().out)["family"] == "hartogs"


def test_sfunction(tmp_path, capsys):
    code = main(["sfunction", str(DATA / "two_connected.json"), "--grid", "3", "--radius", "0.3",
                 "--center", "0.1,-0.3", "--nodes", "128", "--emit", "csv,svg", "--out", str(tmp_path)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["points"] == 5 and summary["min_span"] > 0
    assert (tmp_path / "sfunction.csv").read_text().startswith("eta_re,eta_im,span,status")


def test_verify_disk_suite(capsys):
    assert main(["verify", "disk"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.strip().endswith("checks passed")


def test_scan_product_family_is_flat(tmp_path, capsys):
    import csv

    assert main(["scan", "product", "--grid", "3", "--nodes", "128", "--out", str(tmp_path)]) == 0
    with open(tmp_path / "scan.csv") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        assert abs(float(r["lap_span"])) <= 1e-8 and abs(float(r["lap_beta"])) <= 1e-8
