"""Command-line entry point.

Subcommands `direct`, `frozen`, `approx`, and `ensemble` run the matching
simulation mode and write summary/theory/manifest artifacts; `fit-order`
performs the log-log least-squares exponent fit on (sigma, error) pairs.
Options may come from a key=value config file (--config), with command-line
flags taking precedence.
"""

import argparse
import sys

from .ensemble import RunConfig, run_ensemble
from .stats import fit_order

# CLI/config key -> RunConfig field
KEYMAP = {
    "example": "example",
    "sigma": "sigma",
    "cstar": "c_star",
    "domain-halfwidth": "L",
    "cells": "N",
    "dt": "dt",
    "t-end": "t_end",
    "paths": "paths",
    "seed": "seed",
    "stride": "record_stride",
    "weight-a": "weight_a",
    "window": "norm_window",
    "out": "output_dir",
    "store-paths": "store_paths",
    "chunk-size": "chunk_size",
    "max-order": "max_order",
    "omega2": "with_omega2",
    "correlation-len": "correlation_len",
}

_BOOL_FIELDS = {"store_paths", "with_omega2"}
_INT_FIELDS = {"N", "paths", "seed", "record_stride", "chunk_size", "max_order"}
_FLOAT_FIELDS = {"sigma", "c_star", "L", "dt", "t_end", "weight_a", "correlation_len"}


def _parse_window(text):
    lo, hi = (float(p) for p in text.split(","))
    return (lo, hi)


def _coerce(field_name, value):
    if field_name == "norm_window":
        return _parse_window(value) if isinstance(value, str) else value
    if field_name in _BOOL_FIELDS:
        if isinstance(value, bool):
            return value
        return value.strip().lower() in ("1", "true", "yes", "on")
    if field_name in _INT_FIELDS:
        return int(value)
    if field_name in _FLOAT_FIELDS:
        return float(value)
    return value


def _read_config_file(path):
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.strip()!r}")
            key, val = (p.strip() for p in line.split("=", 1))
            key = key.replace("_", "-")
            if key not in KEYMAP:
                raise ValueError(f"unknown config key: {key!r}")
            values[KEYMAP[key]] = _coerce(KEYMAP[key], val)
    return values


def _add_run_flags(sp):
    sp.add_argument("--config", help="key=value config file; flags override it")
    sp.add_argument("--example", choices=("scalar", "white"))
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--cstar", type=float, dest="cstar")
    sp.add_argument("--domain-halfwidth", type=float)
    sp.add_argument("--cells", type=int)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--t-end", type=float)
    sp.add_argument("--paths", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--stride", type=int)
    sp.add_argument("--weight-a", type=float)
    sp.add_argument("--window", help="LO,HI for the weighted-norm restriction")
    sp.add_argument("--out", help="output directory for CSV/JSON artifacts")
    sp.add_argument("--store-paths", action="store_true", default=None)
    sp.add_argument("--chunk-size", type=int)
    sp.add_argument("--max-order", type=int)
    sp.add_argument("--omega2", action="store_true", default=None)
    sp.add_argument("--correlation-len", type=float)


def _config_from_args(args, mode):
    values = {"mode": mode}
    if args.config:
        values.update(_read_config_file(args.config))
    for flag, field_name in KEYMAP.items():
        attr = flag.replace("-", "_")
        val = getattr(args, attr, None)
        if val is not None:
            values[field_name] = _coerce(field_name, val)
    return RunConfig(**values)


def _parse_point(text):
    sigma, err = (float(p) for p in text.split("=", 1))
    return sigma, err


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="solitonlab",
        description="Stochastic KdV soliton laboratory: direct and frozen-frame "
        "solvers, approximation hierarchy, Monte Carlo ensembles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for mode, help_text in (
        ("direct", "integrate the stochastic KdV equation in the lab frame"),
        ("frozen", "run the frozen-frame modulation solver"),
        ("approx", "run the order-0/1/2 approximation hierarchy"),
        ("ensemble", "co-simulate frozen-frame and approximations"),
    ):
        _add_run_flags(sub.add_parser(mode, help=help_text))
    fo = sub.add_parser("fit-order", help="log-log least-squares exponent fit")
    fo.add_argument(
        "--point",
        action="append",
        required=True,
        metavar="SIGMA=ERROR",
        help="one (noise level, error) pair; give at least three",
    )

    args = parser.parse_args(argv)
    if args.command == "fit-order":
        pts = [_parse_point(p) for p in args.point]
        fit = fit_order([p[0] for p in pts], [p[1] for p in pts])
        print(f"beta={fit.beta:.6g} k={fit.k:.6g} residual={fit.residual:.3g}")
        return 0

    cfg = _config_from_args(args, mode=args.command)
    summary = run_ensemble(cfg)
    print(
        f"{cfg.mode}: {cfg.paths} paths, {len(summary.times)} record times, "
        f"{summary.excluded} excluded, "
        f"wall {summary.manifest['wall_time_s']}s"
        + (f", artifacts in {cfg.output_dir}" if cfg.output_dir else "")
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
