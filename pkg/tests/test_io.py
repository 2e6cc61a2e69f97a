import json

import numpy as np
import pytest

from rimspinor import io
from rimspinor.bilinears import compute_bilinears, fierz_residuals
from rimspinor.exotic import GridSpec, SpinorField


def test_spinor_jsonl_round_trip(tmp_path, rng):
    psis = rng.normal(size=(5, 4)) + 1j * rng.normal(size=(5, 4))
    path = tmp_path / "s.jsonl"
    io.write_spinors(path, psis, [f"p{k}" for k in range(5)])
    recs = io.read_spinors(path)
    assert all(r.ok for r in recs)
    assert np.array_equal(np.array([r.psi for r in recs]), psis)
    assert recs[2].label == "p2" and recs[2].line == 3


@pytest.mark.parametrize("line, msg", [
    ("not json", "invalid JSON"),
    ("[1, 2]", "object"),
    ('{"re": [1, 0, 0, 0]}', "missing"),
    ('{"re": [1, 0, 0], "im": [0, 0, 0, 0]}', "4 entries"),
    ('{"re": ["a", 0, 0, 0], "im": [0, 0, 0, 0]}', "numeric"),
])
def test_bad_lines_become_errors(line, msg):
    good = json.dumps({"re": [1, 0, 0, 0], "im": [0, 0, 0, 0]})
    recs = io.read_spinors([good, line, "", good])
    assert [r.ok for r in recs] == [True, False, True]
    assert msg in recs[1].error and recs[1].line == 2


def test_bilinear_and_fierz_dicts(dirac, rng):
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    b = compute_bilinears(psi, dirac)
    back = io.bilinears_from_dict(json.loads(json.dumps(b.to_dict())))
    assert np.allclose(back.S, b.S) and back.A == b.A
    f = fierz_residuals(psi, dirac).to_dict()
    assert set(f) == {"residuals", "sigma", "omega"} and len(f["residuals"]) == 5
    assert io.fierz_from_dict(f).omega == f["omega"]
    with pytest.raises(io.FormatError):
        io.fierz_from_dict({"residuals": [0, 0], "sigma": 0, "omega": 0})


def test_grid_round_trip(tmp_path, rng):
    g = GridSpec((5, 6), 0.125, (0.5, -1.0))
    vals = rng.normal(size=(5, 6, 4)) + 1j * rng.normal(size=(5, 6, 4))
    path = tmp_path / "f.bin"
    io.write_spinor_grid(path, SpinorField(g, vals, "test", "chiral"))
    f = io.read_spinor_grid(path)
    assert f.grid == g and f.convention == "chiral" and np.array_equal(f.values, vals)
    # layout: row-major nodes, components, then (re, im)
    raw = path.read_bytes()
    n = int.from_bytes(raw[8:16], "little")
    header = json.loads(raw[16:16 + n])
    assert header["dims"] == [5, 6] and header["convention"] == "chiral"
    data = np.frombuffer(raw[16 + n:], "<f8")
    assert data[0] == vals[0, 0, 0].real and data[1] == vals[0, 0, 0].imag and data[2] == vals[0, 0, 1].real


def test_theta_round_trip(tmp_path):
    g = GridSpec((4, 3), 0.5)
    th = np.arange(12.0).reshape(4, 3)
    io.write_theta_grid(tmp_path / "t.bin", g, th, "ramp")
    g2, th2, label = io.read_theta_grid(tmp_path / "t.bin")
    assert g2 == g and label == "ramp" and np.array_equal(th2, th)


def test_corrupt_files(tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(b"NOTMAGIC" + bytes(8))
    with pytest.raises(io.FormatError, match="magic"):
        io.read_spinor_grid(p)
    g = GridSpec((3, 3), 1.0)
    io.write_theta_grid(p, g, np.zeros((3, 3)))
    p.write_bytes(p.read_bytes()[:-8])
    with pytest.raises(io.FormatError):
        io.read_theta_grid(p)
    with pytest.raises(io.FormatError):
        io.read_spinor_grid(p)
