"""File formats: spinor JSONL, bilinear/Fierz JSON and binary grid files.

Grid files start with an 8-byte magic, a little-endian uint64 giving the
length of a UTF-8 JSON header, the header itself, then little-endian float64
data in row-major order. Spinor grids store ``(re, im)`` pairs for each of the
four components at every node; theta grids store one value per node.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bilinears import BilinearSet, FierzReport
from .clifford import as_spinor
from .exotic import GridSpec, SpinorField

SPINOR_MAGIC = b"RIMGRID1"
THETA_MAGIC = b"RIMTHETA"
_LEN = struct.Struct("<Q")


class FormatError(ValueError):
    pass


@dataclass
class SpinorRecord:
    line: int
    psi: np.ndarray | None = None
    label: str | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def spinor_to_record(psi, label: str | None = None) -> dict:
    psi = as_spinor(psi)
    rec = {"re": [float(x) for x in psi.real], "im": [float(x) for x in psi.imag]}
    if label is not None:
        rec["label"] = label
    return rec


def parse_spinor_line(text: str) -> tuple[np.ndarray, str | None]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise FormatError("record must be a JSON object")
    missing = [k for k in ("re", "im") if k not in obj]
    if missing:
        raise FormatError(f"missing field(s): {', '.join(missing)}")
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (TypeError, ValueError):
        raise FormatError("re/im must be numeric arrays") from None
    if re.shape != (4,) or im.shape != (4,):
        raise FormatError(f"re/im must have 4 entries, got {re.shape} and {im.shape}")
    try:
        psi = as_spinor(re + 1j * im)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    label = obj.get("label")
    return psi, None if label is None else str(label)


def read_spinors(path_or_lines) -> list[SpinorRecord]:
    """Parse a JSONL stream; bad lines become records with ``error`` set."""
    if isinstance(path_or_lines, (str, Path)):
        lines = Path(path_or_lines).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(path_or_lines)
    out = []
    for i, text in enumerate(lines, start=1):
        if not text.strip():
            continue
        try:
            psi, label = parse_spinor_line(text)
            out.append(SpinorRecord(i, psi, label))
        except FormatError as exc:
            out.append(SpinorRecord(i, error=str(exc)))
    return out


def write_spinors(path, spinors, labels=None) -> None:
    spinors = np.atleast_2d(as_spinor(spinors))
    labels = labels if labels is not None else [None] * len(spinors)
    with open(path, "w", encoding="utf-8") as fh:
        for psi, lab in zip(spinors, labels):
            fh.write(json.dumps(spinor_to_record(psi, lab)) + "\n")


def bilinears_from_dict(d: dict) -> BilinearSet:
    """Inverse of ``BilinearSet.to_dict``. ``norm2`` is not stored; it is
    recovered from ``|psi|^2 = J_0`` in the standard representation."""
    J = np.asarray(d["J"], float)
    K = np.asarray(d["K"], float)
    S = np.asarray(d["S"], float)
    if J.shape != (4,) or K.shape != (4,) or S.shape != (4, 4):
        raise FormatError("J, K need 4 entries and S must be 4x4")
    return BilinearSet(float(d["A"]), float(d["B"]), J, K, S, float(d.get("norm2", J[0])))


def fierz_from_dict(d: dict) -> FierzReport:
    res = np.asarray(d["residuals"], float)
    if res.shape != (5,):
        raise FormatError("FierzReport needs 5 residuals")
    return FierzReport(res, float(d["sigma"]), float(d["omega"]))


# -- binary grids ---------------------------------------------------------------

def _write(path, magic, header, data):
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(magic)
        fh.write(_LEN.pack(len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())


def _read(path, magic):
    raw = Path(path).read_bytes()
    if raw[:8] != magic:
        raise FormatError(f"{path}: bad magic {raw[:8]!r}")
    if len(raw) < 8 + _LEN.size:
        raise FormatError(f"{path}: truncated header")
    (n,) = _LEN.unpack_from(raw, 8)
    start = 8 + _LEN.size
    try:
        header = json.loads(raw[start:start + n].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise FormatError(f"{path}: unreadable JSON header") from None
    body = raw[start + n:]
    if len(body) % 8:
        raise FormatError(f"{path}: payload is not a whole number of float64 values")
    return header, np.frombuffer(body, dtype="<f8")


def _grid_from_header(h) -> GridSpec:
    try:
        return GridSpec(tuple(h["dims"]), float(h["spacing"]), tuple(h.get("origin", (0.0, 0.0))))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"grid header incomplete: {exc}") from None


def write_spinor_grid(path, field: SpinorField) -> None:
    header = {**field.grid.to_dict(), "convention": field.convention, "provenance": field.provenance}
    data = np.stack([field.values.real, field.values.imag], axis=-1)
    _write(path, SPINOR_MAGIC, header, data)


def read_spinor_grid(path) -> SpinorField:
    h, data = _read(path, SPINOR_MAGIC)
    grid = _grid_from_header(h)
    expect = grid.dims[0] * grid.dims[1] * 8
    if data.size != expect:
        raise FormatError(f"{path}: expected {expect} values, found {data.size}")
    pairs = data.reshape(*grid.dims, 4, 2)
    values = pairs[..., 0] + 1j * pairs[..., 1]
    return SpinorField(grid, values, h.get("provenance", "file"), h.get("convention", "standard-Dirac"))


def write_theta_grid(path, grid: GridSpec, theta, label: str = "custom") -> None:
    theta = np.asarray(theta, float)
    if theta.shape != grid.dims:
        raise ValueError("theta shape does not match grid")
    _write(path, THETA_MAGIC, {**grid.to_dict(), "label": label}, theta)


def read_theta_grid(path) -> tuple[GridSpec, np.ndarray, str]:
    h, data = _read(path, THETA_MAGIC)
    grid = _grid_from_header(h)
    if data.size != grid.dims[0] * grid.dims[1]:
        raise FormatError(f"{path}: theta payload size mismatch")
    return grid, data.reshape(grid.dims).copy(), h.get("label", "custom")
