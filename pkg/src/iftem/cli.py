"""
Command-line entry point.

    iftem simulate   --config sig.json [--seed N] [--out-dir D]
    iftem decode     --config sig.json [--trace D/trace.csv] [--method robust|baseline]
    iftem ingest     --trace scope.csv --config sig.json [--kappa --bias --delta]
    iftem experiment perfect|cond|mse [--trials N] [--config exp.json]

Exit status: 0 on success, 1 on a domain or file error, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import io
from .encoder import FiringTrace, TemParams, add_jitter, check_rate, design_params, encode
from .errors import IFTEMError
from .kernel import SosKernel, filter_signal
from .recovery import decode
from .spectral import mse_delays

log = logging.getLogger("iftem")


def _tem_params(cfg, c, K, T):
    tem = cfg.get("tem", {})
    if {"bias_b", "kappa", "delta"} <= tem.keys():
        return TemParams.from_dict(tem)
    return design_params(c, K, T, tem.get("bias_factor", 2.5), tem.get("kappa", 1.0),
                         tem.get("margin", 1.1))


def _require(cfg, key):
    if key not in cfg:
        raise IFTEMError(f"config is missing {key!r}")
    return cfg[key]


def _grid(cfg, T):
    step = cfg.get("grid_s")
    if step is None:
        return None
    return np.arange(1, int(round(T / step)) + 1) * step


def cmd_simulate(args, cfg, out):
    t0 = time.perf_counter()
    sig = io.load_signal(cfg)
    K = int(_require(cfg, "K"))
    f = filter_signal(sig, SosKernel.for_period(K, sig.period))
    params = _tem_params(cfg, f.bound_c, K, sig.period)
    trace = encode(f, params, 0.0, sig.period * cfg.get("periods", 1))
    sigma = float(cfg.get("jitter_s", 0.0))
    if sigma > 0:
        trace = add_jitter(trace, sigma, args.seed)
    t1 = time.perf_counter()
    io.write_trace(trace, out / "trace.csv")
    ok, margin = check_rate(params, f.bound_c, K, sig.period)
    diag = {"bound_c": f.bound_c, "rate_condition": ok, "rate_margin": margin,
            **io.rate_diagnostics(trace.times, sig.period, sig.L, K, sig.shape)}
    io.save_json(io.make_manifest("simulate", cfg, args.seed, {"encode": t1 - t0}, diag),
                 out / "manifest.json")
    print(f"{len(trace)} firings -> {out / 'trace.csv'}")
    return 0


def _decode_and_report(args, cfg, out, trace, command):
    t0 = time.perf_counter()
    T = float(_require(cfg, "period_s"))
    K = int(_require(cfg, "K"))
    pulse = io.pulse_from_config(cfg)
    L = int(cfg.get("L", len(cfg.get("pulses", []))))
    if L < 1:
        raise IFTEMError("config must give L or the list of pulses")
    res = decode(trace, K, L, pulse, T, args.method, grid=_grid(cfg, T))
    t1 = time.perf_counter()
    result = res.to_dict()
    if cfg.get("pulses"):
        truth = io.load_signal(cfg)
        order = np.argsort(truth.delays)
        err = np.abs(truth.delays[order] - res.delays)
        result["max_delay_err_s"] = float(np.max(np.minimum(err, T - err)))
        result["max_rel_amp_err"] = float(np.max(
            np.abs(truth.amplitudes[order] - res.amplitudes) / np.abs(truth.amplitudes[order])))
        result["mse_db"] = mse_delays(truth.delays / T, res.delays / T, 1.0)
    io.save_json(result, out / "result.json")
    diag = io.rate_diagnostics(trace.times, T, L, K, pulse)
    diag["cond"] = res.fsc.cond
    io.save_json(io.make_manifest(command, cfg, args.seed, {"decode": t1 - t0}, diag),
                 out / "manifest.json")
    for a, tau in zip(res.amplitudes, res.delays):
        print(f"a = {a: .9g}  tau = {tau:.12g} s")
    return 0


def cmd_decode(args, cfg, out):
    path = Path(args.trace) if args.trace else out / "trace.csv"
    times = io.read_times(path)
    side = io.read_sidecar(path)
    if side is not None:
        params = TemParams.from_dict(side["params"])
    elif {"bias_b", "kappa", "delta"} <= cfg.get("tem", {}).keys():
        params = TemParams.from_dict(cfg["tem"])
    else:
        raise IFTEMError("no TEM parameters: provide a sidecar or explicit tem in config")
    return _decode_and_report(args, cfg, out, FiringTrace(times, params, "ingested"), "decode")


def cmd_ingest(args, cfg, out):
    params = None
    if None not in (args.kappa, args.bias, args.delta):
        params = TemParams(args.bias, args.kappa, args.delta)
    elif {"bias_b", "kappa", "delta"} <= cfg.get("tem", {}).keys():
        params = TemParams.from_dict(cfg["tem"])
    trace = io.ingest_trace(args.trace, params, float(_require(cfg, "period_s")),
                            K=int(_require(cfg, "K")))
    return _decode_and_report(args, cfg, out, trace, "ingest")


_FACTORIES = {"perfect": ex.ExperimentConfig.perfect_recovery,
              "cond": ex.ExperimentConfig.condition_number,
              "mse": ex.ExperimentConfig.mse_sweep}


def cmd_experiment(args, cfg, out):
    kw = dict(cfg)
    kw.pop("kind", None)
    kw["seed"] = args.seed
    if args.trials is not None:
        kw["trials"] = args.trials
    if args.jobs is not None:
        kw["n_jobs"] = args.jobs
    try:
        ecfg = _FACTORIES[args.which](**kw)
    except TypeError as exc:
        raise IFTEMError(f"bad experiment config: {exc}") from exc
    table = ex.run(ecfg)
    table.to_csv(out / "table.csv")
    io.save_json(io.make_manifest(f"experiment {args.which}", ecfg.to_dict(), args.seed,
                                  {"run": table.metadata["elapsed_s"]},
                                  {"config_hash": table.metadata["config_hash"],
                                   "rows": len(table.rows)}),
                 out / "manifest.json")
    print(f"{len(table.rows)} rows -> {out / 'table.csv'}")
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out-dir", default=".")
    common.add_argument("--config", help="JSON config file")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="iftem", description=__doc__.splitlines()[1],
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common], help="encode a signal to a firing trace")

    d = sub.add_parser("decode", parents=[common], help="recover pulses from a trace")
    d.add_argument("--trace")
    d.add_argument("--method", choices=("robust", "baseline"), default="robust")

    g = sub.add_parser("ingest", parents=[common], help="decode an external trace")
    g.add_argument("--trace", required=True)
    g.add_argument("--method", choices=("robust", "baseline"), default="robust")
    g.add_argument("--kappa", type=float)
    g.add_argument("--bias", type=float)
    g.add_argument("--delta", type=float)

    e = sub.add_parser("experiment", parents=[common], help="run a Monte-Carlo study")
    e.add_argument("which", choices=tuple(_FACTORIES))
    e.add_argument("--trials", type=int)
    e.add_argument("--jobs", type=int)
    return p


_COMMANDS = {"simulate": cmd_simulate, "decode": cmd_decode, "ingest": cmd_ingest,
             "experiment": cmd_experiment}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = io.load_json(args.config) if args.config else {}
        if args.command in ("simulate", "decode") and not cfg:
            raise IFTEMError(f"{args.command} needs --config")
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](args, cfg, out)
    except (IFTEMError, OSError, KeyError, ValueError) as exc:
        print(f"iftem: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
