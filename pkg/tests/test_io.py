import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swlw.grid import Grid
from swlw.io import CsvSink, format_value, load_state, read_csv, read_snapshot, write_snapshot
from swlw.scenarios import smooth_random
from swlw.state import ModelParams
from swlw.stepper import StepConfig, run


@settings(max_examples=50)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    assert float(format_value(x)) == x
    assert float(format_value(np.float64(x))) == x


def test_snapshot_round_trip_is_bit_exact(tmp_path):
    g = Grid(16)
    state = run(smooth_random(g), 3e-3, StepConfig(), ModelParams()).final
    path = tmp_path / "s.bin"
    header = write_snapshot(path, state)
    assert header["n"] == 16 and header["endianness"] == "little"
    back = load_state(path)
    for name in ("rho", "u", "H", "psi", "rho0"):
        np.testing.assert_array_equal(getattr(back, name), getattr(state, name))
    for name in ("disp", "x", "E", "B", "log_j"):
        np.testing.assert_array_equal(getattr(back.flow, name), getattr(state.flow, name))
    assert back.t == state.t and back.flow.t == state.flow.t


def test_snapshot_rejects_corruption(tmp_path):
    path = tmp_path / "s.bin"
    write_snapshot(path, smooth_random(Grid(8)))
    data = path.read_bytes()
    (tmp_path / "short.bin").write_bytes(data[:-8])
    with pytest.raises(ValueError, match="payload length"):
        read_snapshot(tmp_path / "short.bin")
    (tmp_path / "v9.bin").write_bytes(data.replace(b'"schema": 1', b'"schema": 9', 1))
    with pytest.raises(ValueError, match="schema"):
        read_snapshot(tmp_path / "v9.bin")


def test_csv_sink_round_trip(tmp_path):
    path = tmp_path / "d.csv"
    rows = [{"a": 0.1, "b": 1e-300}, {"a": 1 / 3, "b": -2.5}]
    with CsvSink(path, columns=("a", "b")) as sink:
        for i, r in enumerate(rows):
            sink.write(i, r)
    assert path.read_text().splitlines()[0] == "step,a,b"
    back = read_csv(path)
    assert back == [{"step": 0, **rows[0]}, {"step": 1, **rows[1]}]
