"""
File formats: signal configs (JSON), firing traces (CSV + JSON sidecar),
result tables (CSV) and run manifests (JSON).

Trace CSV::

    t_seconds
    1.0312500000000000e-02
    ...

Times are written with 17 significant digits so an export/ingest roundtrip
reproduces every double exactly.
"""

from __future__ import annotations

import json
import logging
import platform
from pathlib import Path

import numpy as np

from .encoder import INGESTED, FiringTrace, TemParams
from .errors import ParseError, TooFewFirings
from .model import DIRAC, FriSignal, PulseShape

__all__ = ["load_json", "save_json", "load_signal", "write_trace", "read_times",
           "read_sidecar", "ingest_trace", "rate_diagnostics", "make_manifest",
           "sidecar_path", "TRACE_HEADER"]

log = logging.getLogger(__name__)

TRACE_HEADER = "t_seconds"


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.lineno) from exc


def save_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def load_signal(cfg):
    """FriSignal from a config dict or JSON path ({period_s, shape, pulses})."""
    if not isinstance(cfg, dict):
        cfg = load_json(cfg)
    try:
        return FriSignal.from_dict(cfg)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad signal config: missing or malformed {exc}") from exc


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def write_trace(trace, path):
    """Write `trace` as CSV plus a JSON sidecar holding params and provenance."""
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(TRACE_HEADER + "\n")
        for t in trace.times:
            fh.write(f"{t:.16e}\n")
    save_json(trace.metadata(), sidecar_path(path))
    return path


def read_times(path):
    """
    Firing times from a trace CSV.

    Blank lines are skipped.  Out-of-order rows are sorted with a warning;
    duplicates are an error since they cannot come from a TEM.
    """
    path = Path(path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != TRACE_HEADER:
        raise ParseError(f"{path}: expected header {TRACE_HEADER!r}", 1)
    times = []
    for lineno, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if not s:
            continue
        try:
            v = float(s.split(",")[0])
        except ValueError:
            raise ParseError(f"{path}: not a number: {s!r}", lineno) from None
        if not np.isfinite(v):
            raise ParseError(f"{path}: non-finite time {s!r}", lineno)
        times.append(v)
    t = np.array(times)
    if t.size > 1 and np.any(np.diff(t) <= 0):
        log.warning("%s: firing times not strictly increasing; sorting", path)
        t = np.sort(t)
        if np.any(np.diff(t) == 0):
            raise ParseError(f"{path}: duplicate firing times")
    return t


def read_sidecar(path):
    p = sidecar_path(path)
    return load_json(p) if p.exists() else None


def ingest_trace(path, params=None, period=None, L=None, K=None, pulse=None):
    """
    Load an externally captured trace for decoding.

    `params` falls back to the JSON sidecar next to the CSV.  With `K` given,
    at least 2K + 2 firings are required in the first period.
    """
    times = read_times(path)
    if params is None:
        side = read_sidecar(path)
        if side is None or "params" not in side:
            raise ParseError(f"{path}: no TEM parameters given and no sidecar found")
        params = TemParams.from_dict(side["params"])
    if K is not None:
        window = times
        if period is not None and times.size:
            window = times[times < times[0] + period]
        n = window.size
        if n < 2 * K + 2:
            raise TooFewFirings(f"{n} firings in the analysis window, need {2 * K + 2}")
    return FiringTrace(times, params, INGESTED)


def bandwidth_hz(pulse, K, period):
    """Highest significant frequency: first spectral null 1/w, or K/T for Diracs."""
    if pulse.kind == DIRAC:
        return K / period
    return max(1.0 / pulse.width, K / period)


def rate_diagnostics(times, period, L, K, pulse):
    """Firing rate against the rate of innovation and the Nyquist rate."""
    t = np.asarray(times)
    n = int(np.sum(t < t[0] + period)) if t.size else 0
    firing_rate = n / period
    nyquist = 2 * bandwidth_hz(pulse, K, period)
    return {
        "n_firings": n,
        "firing_rate_hz": firing_rate,
        "rate_of_innovation_hz": 2 * L / period,
        "rate_over_innovation": firing_rate * period / (2 * L),
        "nyquist_rate_hz": nyquist,
        "sub_nyquist_factor": nyquist / firing_rate if firing_rate else float("inf"),
    }


def make_manifest(command, config, seed, timings, diagnostics=None):
    from . import __version__
    return {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "timings_s": timings,
        "diagnostics": diagnostics or {},
    }


def pulse_from_config(cfg):
    return PulseShape.from_dict(cfg.get("shape", {"kind": DIRAC}))
