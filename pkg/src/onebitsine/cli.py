"""Command-line front end.

Subcommands: synth, sample, estimate, bench.  Structured outputs are JSON
(signals, signed records, estimate reports) and CSV (benchmark sweeps).
Exit codes: 0 success, 2 usage error, 3 unreadable/invalid input data,
4 internal numerical failure.  A JSON config file whose keys mirror the
long flag names (hyphens or underscores) can pre-set any flag; explicit
flags win.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench as bench_mod
from .mmcore import MmConfig
from .relax import RelaxConfig, estimate
from .sigmodel import (RngState, SignedRecord, SinusoidSet, ThresholdSpec,
                       sample_one_bit, snr_to_sigma, synth)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4


def _parse_threshold(spec: str) -> ThresholdSpec:
    parts = spec.split(":")
    if parts[0] == "fixed":
        if len(parts) == 2:
            return ThresholdSpec("fixed", value=float(parts[1]))
        if len(parts) == 3:
            return ThresholdSpec("fixed", value=complex(float(parts[1]), float(parts[2])))
    elif parts[0] == "discrete":
        if len(parts) == 1:
            return ThresholdSpec("discrete-random")
        if len(parts) == 4:
            return ThresholdSpec("discrete-random", levels=int(parts[1]),
                                 low=float(parts[2]), high=float(parts[3]))
    raise ValueError(f"bad threshold spec {spec!r}; use fixed:V[:IM] or discrete:LEVELS:LO:HI")


def _signal_from_flags(args, parser) -> SinusoidSet:
    if (args.preset is None) == (args.components is None):
        parser.error("exactly one of --preset / --components is required")
    if args.n is None or args.n <= 0:
        parser.error("--n must be a positive sample count")
    if args.preset is not None:
        presets = {"example1": bench_mod.example1_signal,
                   "example2": bench_mod.example2_signal}
        if args.preset not in presets:
            parser.error(f"unknown preset {args.preset!r}")
        return presets[args.preset](args.n)
    items = json.loads(args.components)
    return SinusoidSet.from_json_list(items, args.dim)


def _shape_from_flags(args, dim):
    if dim == "c2":
        n2 = args.n2 if args.n2 is not None else args.n
        return (args.n, n2)
    return args.n


def _write_json(obj, path):
    text = json.dumps(obj, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _samples_json(s: np.ndarray):
    if np.iscomplexobj(s):
        if s.ndim == 2:
            return [[[float(v.real), float(v.imag)] for v in row] for row in s]
        return [[float(v.real), float(v.imag)] for v in s]
    return [float(v) for v in s]


def _cmd_synth(args, parser) -> int:
    sig = _signal_from_flags(args, parser)
    s = synth(sig, _shape_from_flags(args, sig.dim))
    _write_json(_samples_json(s), args.out)
    return EXIT_OK


def _cmd_sample(args, parser) -> int:
    if args.seed is None:
        parser.error("--seed is required for reproducible sampling")
    if (args.snr is None) == (args.sigma is None):
        parser.error("exactly one of --snr / --sigma is required")
    sig = _signal_from_flags(args, parser)
    try:
        thr = _parse_threshold(args.threshold)
    except ValueError as exc:
        parser.error(str(exc))
    sigma = args.sigma if args.sigma is not None else snr_to_sigma(sig, args.snr)
    shape = _shape_from_flags(args, sig.dim)
    clean = synth(sig, shape) if sig.order else (
        np.zeros(shape) if sig.dim == "r1" else np.zeros(shape, dtype=complex))
    rng = RngState(args.seed)
    record = sample_one_bit(clean, sigma, thr, rng, dim=sig.dim)
    record.truth = sig
    record.sigma = sigma
    _write_json(record.to_json_dict(), args.out)
    return EXIT_OK


def _cmd_estimate(args, parser) -> int:
    if (args.order is None) == (args.bic is None):
        parser.error("exactly one of --order / --bic is required")
    try:
        record = SignedRecord.load(args.record)
    except Exception as exc:  # noqa: BLE001
        print(f"error: cannot read record {args.record!r}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cfg = RelaxConfig(grid_size=args.grid) if args.grid else RelaxConfig()
    rep = estimate(record, args.method, order=args.order, bic_max=args.bic,
                   config=cfg, mm_config=MmConfig())
    _write_json(rep.to_json_dict(with_timings=not args.no_timings), args.out)
    return EXIT_OK


def _scenario_from_json(d: dict) -> bench_mod.McScenario:
    sig = d["signal"]
    if isinstance(sig, dict) and "preset" in sig:
        signal = {"example1": bench_mod.example1_signal,
                  "example2": bench_mod.example2_signal}[sig["preset"]]
    else:
        signal = SinusoidSet.from_json_list(sig.get("components", []), sig.get("dim", "r1"))
    thr = d.get("threshold", {})
    threshold = ThresholdSpec(thr.get("kind", "discrete-random"),
                              value=complex(*thr["value"]) if isinstance(thr.get("value"), list)
                              else thr.get("value", 0.0),
                              levels=thr.get("levels", 8),
                              low=thr.get("low", -1.0), high=thr.get("high", 1.0))
    return bench_mod.McScenario(
        name=d.get("name", "scenario"), signal=signal,
        sweep_var=d["sweep_var"], sweep_values=tuple(d["sweep_values"]),
        n=d.get("n", 1024), snr_db=d.get("snr_db", 10.0), threshold=threshold,
        trials=d.get("trials", 25), base_seed=d.get("base_seed", 20260801),
        estimators=tuple(d.get("estimators", bench_mod.ESTIMATORS)),
        order=d.get("order"), bic_max=d.get("bic_max"),
        noise_sigma=d.get("noise_sigma"))


def _cmd_bench(args, parser) -> int:
    if (args.preset is None) == (args.scenario is None):
        parser.error("exactly one of --preset / --scenario is required")
    if args.preset is not None:
        presets = bench_mod.scenario_presets()
        if args.preset not in presets:
            parser.error(f"unknown preset {args.preset!r}; choices: {sorted(presets)}")
        sc = presets[args.preset]
    else:
        try:
            with open(args.scenario) as fh:
                sc = _scenario_from_json(json.load(fh))
        except Exception as exc:  # noqa: BLE001
            print(f"error: cannot read scenario {args.scenario!r}: {exc}", file=sys.stderr)
            return EXIT_INPUT
    if args.trials is not None:
        sc.trials = args.trials
    if args.seed is not None:
        sc.base_seed = args.seed
    result = bench_mod.run_scenario(sc)
    if args.out in (None, "-"):
        import io
        buf = io.StringIO()
        _write_csv_to(result, buf, not args.no_timings)
        sys.stdout.write(buf.getvalue())
    else:
        bench_mod.write_csv(result, args.out, with_timings=not args.no_timings)
    return EXIT_OK


def _write_csv_to(result, fh, with_timings):
    import csv as _csv
    w = _csv.writer(fh)
    w.writerow(bench_mod.CSV_COLUMNS)
    for row in result.rows:
        out = []
        for col in bench_mod.CSV_COLUMNS:
            v = row[col]
            if col == "mean_runtime_ms" and not with_timings:
                v = 0.0
            out.append(f"{v:.17e}" if isinstance(v, float) else v)
        w.writerow(out)


def _add_signal_flags(p):
    p.add_argument("--preset", help="named signal preset (example1, example2)")
    p.add_argument("--components", help="JSON list of {A, phi, omega} components")
    p.add_argument("--dim", default="r1", choices=("r1", "c1", "c2"),
                   help="dimensionality of --components signals")
    p.add_argument("--n", type=int, help="sample count (first axis for 2-D)")
    p.add_argument("--n2", type=int, help="second-axis sample count (2-D only)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="onebitsine",
        description="Sinusoid estimation from one-bit signed measurements")
    ap.add_argument("--config", help="JSON file of flag defaults (keys mirror long flags)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a clean signal to JSON")
    _add_signal_flags(p)
    p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("sample", help="one-bit sample a signal to a record file")
    _add_signal_flags(p)
    p.add_argument("--snr", type=float, help="per-strongest-component SNR in dB")
    p.add_argument("--sigma", type=float, help="noise scale (alternative to --snr)")
    p.add_argument("--threshold", default="discrete:8:-1:1",
                   help="fixed:V[:IM] or discrete:LEVELS:LO:HI")
    p.add_argument("--seed", type=int, help="RNG seed (required)")
    p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("estimate", help="estimate sinusoid parameters from a record")
    p.add_argument("record", help="SignedRecord JSON file")
    p.add_argument("--method", required=True, choices=("clean", "relax", "mmrelax"))
    p.add_argument("--order", type=int, help="fixed model order")
    p.add_argument("--bic", type=int, help="select order 0..KMAX by information criterion")
    p.add_argument("--grid", type=int, help="coarse search grid size (default N)")
    p.add_argument("--no-timings", action="store_true",
                   help="write elapsed_ms as null for byte-identical outputs")
    p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("bench", help="run a Monte Carlo benchmark sweep to CSV")
    p.add_argument("--preset", help="named scenario preset")
    p.add_argument("--scenario", help="scenario JSON file")
    p.add_argument("--trials", type=int, help="override trial count")
    p.add_argument("--seed", type=int, help="override base seed")
    p.add_argument("--no-timings", action="store_true",
                   help="write mean_runtime_ms as 0 for byte-identical outputs")
    p.add_argument("--out", help="output CSV path (default stdout)")
    return ap


def _apply_config(args, parser):
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except Exception as exc:  # noqa: BLE001
        print(f"error: cannot read config {args.config!r}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    if not isinstance(cfg, dict):
        parser.error("config file must hold a JSON object")
    for key, val in cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            parser.error(f"unknown config key {key!r}")
        if getattr(args, attr) in (None, False):
            setattr(args, attr, val)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, parser)
    handlers = {"synth": _cmd_synth, "sample": _cmd_sample,
                "estimate": _cmd_estimate, "bench": _cmd_bench}
    try:
        return handlers[args.command](args, parser)
    except SystemExit:
        raise
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: bad input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
