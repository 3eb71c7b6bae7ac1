"""Command-line front end: simulate / sweep / drift / verify.

Exit codes: 0 success, 1 configuration problem, 2 numerical failure (the
failing step and residual are printed).
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import load_config
from .errors import (ConfigError, DomainError, NonConvergence, ParameterError,
                     SingularJacobian, UnknownTableau)
from .harness import drift, order_sweep, run_trajectory, write_csv

OUT_DIR_ENV = "FORCED_EP_OUT"


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="forced-ep",
        description=("Structure-preserving integrators for forced rigid-body "
                     "dynamics: trajectories, convergence sweeps, drift "
                     "series, and the verification oracle suite."))
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_config_args(p):
        p.add_argument("--config", required=True,
                       help="path to a key=value experiment config")
        p.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override a config key (repeatable, applied last)")

    add_config_args(sub.add_parser(
        "simulate", help="run one trajectory and write trajectory.csv"))
    add_config_args(sub.add_parser(
        "sweep", help="run a convergence sweep and write order_<method>.csv"))
    add_config_args(sub.add_parser(
        "drift", help="run one trajectory and write drift_<quantity>.csv"))
    p_verify = sub.add_parser(
        "verify", help="run the cross-module oracle suite")
    p_verify.add_argument("--fast", action="store_true",
                          help="trimmed sample counts for a quick smoke run")
    return parser


def _out_path(cfg, filename):
    out_dir = os.environ.get(OUT_DIR_ENV) or cfg.out_dir
    name = f"{cfg.prefix}_{filename}" if cfg.prefix else filename
    return os.path.join(out_dir, name)


def _cmd_simulate(args):
    cfg = load_config(args.config, args.override)
    records = run_trajectory(cfg)
    path = _out_path(cfg, "trajectory.csv")
    write_csv(path, records)
    print(path)
    return 0


def _cmd_sweep(args):
    cfg = load_config(args.config, args.override)
    sweep = order_sweep(cfg)
    path = _out_path(cfg, f"order_{cfg.method}.csv")
    write_csv(path, sweep)
    comp_path = _out_path(cfg, f"order_{cfg.method}_components.csv")
    write_csv(comp_path, sweep.components_table())
    print(path)
    print(comp_path)
    print(f"fitted slope: {sweep.fitted_slope:.3f} "
          f"(reference gap {sweep.reference_gap:.3e})")
    return 0


def _cmd_drift(args):
    cfg = load_config(args.config, args.override)
    records = run_trajectory(cfg)
    for quantity in cfg.quantities:
        series = drift(records, quantity)
        path = _out_path(cfg, f"drift_{series.quantity}.csv")
        write_csv(path, series)
        print(path)
    return 0


def _cmd_verify(args):
    from .verify import run_all
    results = run_all(fast=args.fast)
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 0 if not failed else 2


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"simulate": _cmd_simulate, "sweep": _cmd_sweep,
               "drift": _cmd_drift, "verify": _cmd_verify}[args.verb]
    try:
        return handler(args)
    except (ConfigError, ParameterError, UnknownTableau,
            FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NonConvergence, SingularJacobian, DomainError) as exc:
        detail = ""
        if isinstance(exc, NonConvergence):
            detail = f" (residual {exc.residual_norm:.3e} after " \
                     f"{exc.iterations} iterations)"
        print(f"numerical failure: {exc}{detail}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
