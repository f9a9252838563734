import json

import numpy as np
import pytest

from iftem.encoder import INGESTED, FiringTrace, TemParams, add_jitter
from iftem.errors import ParseError, TooFewFirings
from iftem.io import (ingest_trace, load_json, load_signal, make_manifest, rate_diagnostics,
                      read_times, save_json, sidecar_path, write_trace)
from iftem.model import RECT, PulseShape
from iftem.recovery import decode

from conftest import encoded


def test_trace_roundtrip_lossless(tmp_path, bspline_signal):
    _, tr = encoded(bspline_signal, 7)
    tr = add_jitter(tr, 1e-3, seed=2)
    path = write_trace(tr, tmp_path / "trace.csv")
    back = ingest_trace(path)
    assert np.max(np.abs(back.times - tr.times)) <= 1e-15
    assert back.params == tr.params
    assert back.provenance == INGESTED
    side = json.loads(sidecar_path(path).read_text())
    assert side["provenance"] == "jittered" and side["sigma_s"] == 1e-3


def test_roundtrip_identical_recovery(tmp_path, bspline_signal):
    _, tr = encoded(bspline_signal, 7)
    back = ingest_trace(write_trace(tr, tmp_path / "t.csv"), K=7, period=1.0)
    r1 = decode(tr, 7, 3, bspline_signal.shape, 1.0)
    r2 = decode(back, 7, 3, bspline_signal.shape, 1.0)
    assert np.array_equal(r1.delays, r2.delays)
    assert np.array_equal(r1.amplitudes, r2.amplitudes)


def test_too_few_firings(tmp_path):
    p = tmp_path / "few.csv"
    p.write_text("t_seconds\n0.1\n0.4\n0.7\n")
    with pytest.raises(TooFewFirings):
        ingest_trace(p, TemParams(1.0, 1.0, 0.3), period=1.0, K=2)


@pytest.mark.parametrize("body, line", [
    ("t_seconds\n0.1\nabc\n", 3),
    ("t_seconds\n0.1\n0.2\n\nnan\n", 5),
    ("time\n0.1\n", 1),
])
def test_parse_errors_carry_line_numbers(tmp_path, body, line):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(ParseError) as exc:
        read_times(p)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_unsorted_rows_are_sorted_with_warning(tmp_path, caplog):
    p = tmp_path / "u.csv"
    p.write_text("t_seconds\n0.3\n0.1\n0.2\n")
    assert list(read_times(p)) == [0.1, 0.2, 0.3]
    assert "sorting" in caplog.text
    p.write_text("t_seconds\n0.3\n0.1\n0.3\n")
    with pytest.raises(ParseError):
        read_times(p)


def test_missing_params(tmp_path):
    p = tmp_path / "n.csv"
    p.write_text("t_seconds\n0.1\n0.2\n")
    with pytest.raises(ParseError):
        ingest_trace(p)


def test_json_parse_error_line(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{\n  "period_s": 1.0,\n  oops\n}\n')
    with pytest.raises(ParseError) as exc:
        load_json(p)
    assert exc.value.line == 3


def test_signal_config(tmp_path):
    cfg = {"period_s": 2.0, "shape": {"kind": "rect", "width_s": 0.1},
           "pulses": [{"a": 1.5, "tau_s": 0.5}, {"a": -1.0, "tau_s": 1.25}]}
    save_json(cfg, tmp_path / "s.json")
    sig = load_signal(tmp_path / "s.json")
    assert sig.period == 2.0 and sig.shape == PulseShape(RECT, 0.1)
    assert list(sig.delays) == [0.5, 1.25]
    with pytest.raises(ParseError):
        load_signal({"period_s": 1.0})


def test_rate_diagnostics_bench_numbers():
    # 19 firings in 10 us with L = 2 and 100 ns pulses
    t = np.linspace(0, 9.5e-6, 19)
    d = rate_diagnostics(t, 1e-5, 2, 5, PulseShape(RECT, 1e-7))
    assert d["n_firings"] == 19
    assert d["firing_rate_hz"] == pytest.approx(1.9e6)
    assert d["rate_over_innovation"] == pytest.approx(4.75)
    assert d["sub_nyquist_factor"] == pytest.approx(20e6 / 1.9e6)


def test_manifest_serialises_numpy(tmp_path):
    m = make_manifest("x", {"a": np.float64(1.5)}, 3, {"t": 0.1},
                      {"cond": np.float64(2.0), "v": np.arange(2), "z": 1 + 2j})
    save_json(m, tmp_path / "m.json")
    back = load_json(tmp_path / "m.json")
    assert back["seed"] == 3 and back["diagnostics"]["v"] == [0, 1]
    assert back["diagnostics"]["z"] == [1.0, 2.0]


def test_hardware_scale_times_survive_export(tmp_path):
    t = np.cumsum(np.full(20, 1.5e-8)) + 1e-9
    tr = FiringTrace(t, TemParams(3.0, 3e-8, 1.5))
    back = read_times(write_trace(tr, tmp_path / "hw.csv"))
    assert np.array_equal(back, tr.times)
