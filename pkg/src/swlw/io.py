"""Diagnostics CSV and binary snapshots.

A snapshot is one UTF-8 JSON header line followed by a little-endian float64
payload. The header lists every field with its shape and byte offset into
the payload.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .diagnostics import LEDGER_COLUMNS
from .grid import Grid
from .lagrangian import FlowMapState
from .state import SimState

SCHEMA_VERSION = 1
_DTYPE = np.dtype("<f8")


def format_value(v) -> str:
    """Shortest round-trip decimal for floats."""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class CsvSink:
    """Writes one ledger row per call; the header is fixed by ``columns``."""

    def __init__(self, path, columns=LEDGER_COLUMNS):
        self.path = Path(path)
        self.columns = ("step",) + tuple(columns)
        self._fh = open(self.path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(self.columns)

    def write(self, step: int, row: dict):
        merged = {"step": step, **row}
        self._writer.writerow([format_value(merged[c]) for c in self.columns])

    def __call__(self, record):
        self.write(record.step, record.ledger)

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [{k: (int(v) if k == "step" else float(v)) for k, v in r.items()} for r in rows]


def _fields(state: SimState) -> dict[str, np.ndarray]:
    fm = state.flow
    return {
        "rho": state.rho, "u": state.u, "H": state.H,
        "psi_re": state.psi.real, "psi_im": state.psi.imag, "rho0": state.rho0,
        "disp": fm.disp, "x": fm.x, "E": fm.E, "B": fm.B, "log_j": fm.log_j,
    }


def write_snapshot(path, state: SimState) -> dict:
    arrays = _fields(state)
    entries, offset = [], 0
    for name, arr in arrays.items():
        nbytes = arr.size * _DTYPE.itemsize
        entries.append({"name": name, "shape": list(arr.shape), "offset": offset,
                        "nbytes": nbytes})
        offset += nbytes
    header = {"schema": SCHEMA_VERSION, "n": state.grid.n, "t": state.t,
              "flow_t": state.flow.t, "endianness": "little", "dtype": "float64",
              "payload_bytes": offset, "fields": entries}
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        for arr in arrays.values():
            fh.write(np.ascontiguousarray(arr, dtype=_DTYPE).tobytes())
    return header


def read_snapshot(path) -> tuple[dict, dict[str, np.ndarray]]:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        payload = fh.read()
    if header.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported snapshot schema {header.get('schema')}")
    if len(payload) != header["payload_bytes"]:
        raise ValueError("snapshot payload length does not match its header")
    arrays = {}
    for e in header["fields"]:
        buf = payload[e["offset"]: e["offset"] + e["nbytes"]]
        arrays[e["name"]] = np.frombuffer(buf, dtype=_DTYPE).reshape(e["shape"]).copy()
    return header, arrays


def load_state(path) -> SimState:
    header, a = read_snapshot(path)
    grid = Grid(header["n"])
    flow = FlowMapState(disp=a["disp"], x=a["x"], E=a["E"], B=a["B"], log_j=a["log_j"],
                        t=header["flow_t"])
    return SimState(grid=grid, rho=a["rho"], u=a["u"], H=a["H"],
                    psi=a["psi_re"] + 1j * a["psi_im"], flow=flow, rho0=a["rho0"],
                    t=header["t"])


class SnapshotSink:
    """Writes ``snap_<step>.bin`` every ``interval`` diagnostic records."""

    def __init__(self, directory, interval: int):
        self.dir = Path(directory)
        self.interval = interval

    def __call__(self, record):
        if self.interval and record.step % self.interval == 0:
            write_snapshot(self.dir / f"snap_{record.step:08d}.bin", record.state)
