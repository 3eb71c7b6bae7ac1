#!/usr/bin/env python3
"""Regenerate the drift and convergence-order artifacts plus figure specs.

Writes, into --out (default: results/):

* drift CSVs comparing the 2-stage Gauss integrator against the classical
  RK4 baseline on the dissipative (double-bracket) body at h = 0.01, and on
  the relaxed body at h = 0.1;
* the relaxed body's monotone Casimir growth at h = 0.01;
* convergence-order CSVs for the shipped variational methods (orders 2, 4
  on the dissipative body; order 6 on the relaxed body, on coarser grids
  where its error still sits above the roundoff floor);
* one ``.spec`` file per figure, in the flat key=value format consumed by
  the companion ``plots`` tool:  ``plots results/fig_llg_order.spec``.

The order sweeps share one reference trajectory per system (3-stage Gauss
at ref_h, with a ref_h/2 self-consistency check), which dominates the
runtime; ``--quick`` coarsens the reference for smoke runs.
"""

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from forced_ep.harness import (ExperimentConfig, drift, order_sweep,
                               reference_solution, run_trajectory, write_csv)

LLG_BASE = ExperimentConfig(
    system="llg", retraction="cay", t_final=1.0, alpha=1.0,
    eta0=(2.0 ** -0.5, 0.0, 2.0 ** -0.5), inertia=(0.5, 2.0, 1.0),
    sweep_h=(0.1, 0.05, 0.025, 0.0125, 0.00625),
    ref_method="gauss3", ref_h=1e-4)

# The 6th-order sweep needs coarser steps (all dividing t_final): at
# h <= 0.1 its error is already at the accumulated-roundoff floor.
RELAXED_BASE = dataclasses.replace(
    LLG_BASE, system="relaxed", beta=0.1, sweep_h=(0.5, 0.25, 0.2, 0.125, 0.1))

LLG_ORDER_METHODS = ("gauss1", "lobatto2", "lobatto3", "gauss2")

DRIFT_LABELS = {"gauss2": "2-stage Gauss (order 4)",
                "rk4_baseline": "classical RK4 (order 4)"}


def _write(path, data):
    write_csv(path, data)
    print(f"  wrote {path}")


def _write_spec(path: Path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"  wrote {path}")


def drift_comparison(out, system, h, quantities):
    """One drift CSV per method and quantity, plus a spec per quantity."""
    print(f"drift comparison: {system} at h={h}")
    series = {}
    for method in ("gauss2", "rk4_baseline"):
        cfg = ExperimentConfig(system=system, method=method, h=h, t_final=1.0)
        records = run_trajectory(cfg)
        for q in quantities:
            name = f"{system}_{method}_drift_{q}.csv"
            _write(out / name, drift(records, q))
            series[(method, q)] = name
    for q in quantities:
        _write_spec(out / f"fig_{system}_{q}_drift.spec", [
            f"# {system}: {q} drift, variational vs baseline, h = {h}",
            "kind = drift",
            f"output = fig_{system}_{q}_drift.svg",
            f"input1 = {series[('gauss2', q)]}",
            f"label1 = {DRIFT_LABELS['gauss2']}",
            f"input2 = {series[('rk4_baseline', q)]}",
            f"label2 = {DRIFT_LABELS['rk4_baseline']}",
        ])


def relaxed_casimir_growth(out):
    print("relaxed body: monotone Casimir growth at h=0.01")
    cfg = ExperimentConfig(system="relaxed", method="gauss1", h=0.01,
                           t_final=1.0)
    records = run_trajectory(cfg)
    _write(out / "relaxed_gauss1_drift_casimir.csv",
           drift(records, "casimir"))
    _write_spec(out / "fig_relaxed_casimir_growth.spec", [
        "# relaxed body: the Casimir acts as an entropy and never decreases",
        "kind = drift",
        "output = fig_relaxed_casimir_growth.svg",
        "input1 = relaxed_gauss1_drift_casimir.csv",
        "label1 = midpoint Gauss (order 2)",
    ])


def order_battery(out, quick):
    ref_h = 1e-3 if quick else None
    specs = []
    for base, methods, slopes in (
            (LLG_BASE, LLG_ORDER_METHODS, (2.0, 4.0)),
            (RELAXED_BASE, ("gauss3",), (6.0,))):
        if ref_h is not None:
            base = dataclasses.replace(base, ref_h=ref_h)
        print(f"order sweeps: {base.system} (reference {base.ref_method} "
              f"at ref_h={base.ref_h:g})")
        reference = reference_solution(base)
        inputs = []
        for method in methods:
            sweep = order_sweep(dataclasses.replace(base, method=method),
                                reference=reference)
            _write(out / f"order_{method}.csv", sweep)
            _write(out / f"order_{method}_components.csv",
                   sweep.components_table())
            print(f"    {method}: fitted slope {sweep.fitted_slope:.3f}")
            inputs.append((f"order_{method}.csv", method))
        lines = [f"# {base.system}: final-momentum error vs step size",
                 "kind = order",
                 f"output = fig_{base.system}_order.svg"]
        for i, (name, label) in enumerate(inputs, start=1):
            lines += [f"input{i} = {name}", f"label{i} = {label}"]
        lines.append("reference_slopes = "
                     + ", ".join(f"{s:g}" for s in slopes))
        specs.append((out / f"fig_{base.system}_order.spec", lines))
    for path, lines in specs:
        _write_spec(path, lines)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results",
                        help="output directory (default: results)")
    parser.add_argument("--quick", action="store_true",
                        help="coarsen the sweep references (ref_h=1e-3) for "
                             "a fast smoke run; shipped figures use 1e-4")
    args = parser.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    drift_comparison(out, "llg", h=0.01, quantities=("energy", "casimir"))
    drift_comparison(out, "relaxed", h=0.1, quantities=("energy",))
    relaxed_casimir_growth(out)
    order_battery(out, quick=args.quick)
    print(f"done in {time.perf_counter() - t0:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
