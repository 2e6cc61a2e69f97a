import json
import subprocess
import sys

import numpy as np
import pytest

from rimspinor import io
from rimspinor.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, run
from rimspinor.lounesto import sample_class


def _run(argv, tmp_path):
    out = tmp_path / "report.json"
    _, code = run(argv + ["--out", str(out)])
    return code, json.loads(out.read_text())


def _strip(report):
    report = dict(report)
    report.pop("wall_time")
    return report


def test_classify_rest_frame(tmp_path):
    path = tmp_path / "p.jsonl"
    io.write_spinors(path, [[1, 0, 0, 0]])
    code, rep = _run(["classify", "--in", str(path)], tmp_path)
    assert code == EXIT_PASS and rep["outcome"] == "pass"
    assert [r["class"] for r in rep["payload"]["records"]] == [2]
    assert set(rep) == {"command", "config", "outcome", "payload", "wall_time"}


def test_malformed_line_is_reported(tmp_path):
    path = tmp_path / "p.jsonl"
    io.write_spinors(path, [[1, 0, 0, 0]])
    with open(path, "a") as fh:
        fh.write("{oops\n")
    code, rep = _run(["classify", "--in", str(path)], tmp_path)
    assert code == EXIT_USAGE and rep["outcome"] == "fail"
    assert rep["payload"]["input_errors"][0]["line"] == 2
    assert len(rep["payload"]["records"]) == 1


def test_usage_errors(tmp_path, capsys):
    assert run(["frobnicate"])[1] == EXIT_USAGE
    assert run(["classify", "--tol", "x"])[1] == EXIT_USAGE
    code, rep = _run(["classify"], tmp_path)
    assert code == EXIT_USAGE and rep["payload"]["violations_detail"]
    code, _ = _run(["fierz", "--trials", "0"], tmp_path)
    assert code == EXIT_USAGE
    code, _ = _run(["classify", "--in", str(tmp_path / "missing.jsonl")], tmp_path)
    assert code == EXIT_USAGE


def test_bilinears_and_fierz(tmp_path, rng):
    path = tmp_path / "p.jsonl"
    io.write_spinors(path, rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4)))
    code, rep = _run(["bilinears", "--in", str(path), "--convention", "chiral"], tmp_path)
    assert code == EXIT_PASS and set(rep["payload"]["records"][0]) >= {"A", "B", "J", "K", "S"}
    code, rep = _run(["fierz", "--in", str(path)], tmp_path)
    assert code == EXIT_PASS and len(rep["payload"]["records"][0]["residuals"]) == 5
    code, rep = _run(["fierz", "--trials", "500", "--seed", "3"], tmp_path)
    assert code == EXIT_PASS and max(rep["payload"]["max_residuals"]) < 1e-10


def test_lemma1_verb_and_replay(tmp_path):
    code, rep = _run(["rim-verify-lemma1", "--trials", "200", "--seed", "7"], tmp_path)
    assert code == EXIT_PASS
    pay = rep["payload"]
    assert pay["violations"] == 0 and pay["class1_count"] == pay["accepted"]
    _, again = _run(["rim-verify-lemma1", "--trials", "200", "--seed", "7"], tmp_path)
    assert _strip(again) == _strip(rep)


def test_rim_build_and_predict(tmp_path, rng):
    path = tmp_path / "p.jsonl"
    io.write_spinors(path, [sample_class(1, k) for k in range(3)])
    out = tmp_path / "d.jsonl"
    code, rep = _run(["rim-build", "--in", str(path), "--a", "1+1j", "--b", "1-2j", "--spinors-out", str(out)], tmp_path)
    assert code == EXIT_PASS and len(io.read_spinors(out)) == 3
    code, rep = _run(["rim-predict", "--in", str(path)], tmp_path)
    # the printed closed forms do not match the direct bilinears
    assert code == EXIT_FAIL
    assert all(r["rederived_relative_mismatch"] < 1e-10 for r in rep["payload"]["records"])
    assert rep["payload"]["violations_detail"][0]["invariant"] == "closed forms match direct bilinears"
    code, _ = _run(["rim-build", "--in", str(path), "--a", "1+1j", "--b", "2-2j"], tmp_path)
    assert code == EXIT_USAGE


def test_sample_verb(tmp_path):
    out = tmp_path / "s.jsonl"
    code, rep = _run(["sample", "--class", "5", "--trials", "4", "--seed", "1", "--spinors-out", str(out)], tmp_path)
    assert code == EXIT_PASS and rep["payload"]["found"] == 4
    code, rep = _run(["classify", "--in", str(out)], tmp_path)
    assert {r["class"] for r in rep["payload"]["records"]} == {5}


def test_witness_verb(tmp_path):
    code, rep = _run(["exotic-witness", "--theta", "linear:0.1"], tmp_path)
    assert code == EXIT_PASS and min(rep["payload"]["order_r1"]) > 1.8
    code, _ = _run(["exotic-witness", "--momentum", "2,1,0,0"], tmp_path)
    assert code == EXIT_USAGE


def test_exotic_demo_small(tmp_path):
    fo, to = tmp_path / "f.bin", tmp_path / "t.bin"
    code, rep = _run(["exotic-demo", "--grid", "12x12", "--spacing", "0.0625",
                      "--field-out", str(fo), "--theta-out", str(to)], tmp_path)
    # the curl threshold cannot be met for a non-integrable condition
    assert code == EXIT_FAIL
    names = {v["invariant"] for v in rep["payload"]["violations_detail"]}
    assert "max_curl_J_below_threshold" in names
    assert io.read_spinor_grid(fo).grid.dims == (12, 12)
    assert io.read_theta_grid(to)[0].dims == (12, 12)
    code, rep = _run(["exotic-demo", "--grid", "64x64", "--spacing", "0.05"], tmp_path)
    assert code == EXIT_FAIL
    assert rep["payload"]["violations_detail"][0]["invariant"] == "bounded regular integration"
    code, _ = _run(["exotic-demo", "--grid", "12by12"], tmp_path)
    assert code == EXIT_USAGE


def test_subcommand_defaults_are_independent():
    from rimspinor.cli import build_parser
    ap = build_parser()
    assert ap.parse_args(["exotic-demo"]).spacing == pytest.approx(1 / 128)
    assert ap.parse_args(["exotic-witness"]).spacing == pytest.approx(0.05)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "rimspinor", "sample", "--class", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["payload"]["class"] == 2
