"""Experiment driver: trajectory runs, reference solutions, convergence-order
sweeps, conservation/dissipation drift series, and deterministic CSV output.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import so3
from .errors import (ConfigError, DomainError, NonConvergence,
                     SingularJacobian)
from .rkmk import (VARIATIONAL_METHODS, initial_record, rk4_baseline_step,
                   step, tableau)
from .systems import (RigidBodyParams, free_rigid_body, relaxed_rigid_body,
                      rigid_body_llg)

RK4_BASELINE = "rk4_baseline"
METHODS = VARIATIONAL_METHODS + (RK4_BASELINE,)
SYSTEM_NAMES = ("free", "llg", "relaxed")
RETRACTION_NAMES = ("exp", "cay")

# Slope fits exclude sweep errors below this; at the finest steps the error
# saturates at accumulated roundoff and would corrupt the fit.
ROUNDOFF_FLOOR = 1e-11


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment needs; every field has a usable default."""
    system: str = "llg"
    method: str = "gauss2"
    retraction: str = "cay"
    h: float = 0.01
    t_final: float = 1.0
    eta0: tuple = (2.0 ** -0.5, 0.0, 2.0 ** -0.5)
    inertia: tuple = (0.5, 2.0, 1.0)
    alpha: float = 1.0
    beta: float = 0.1
    sweep_h: tuple = ()
    ref_method: str = "gauss3"
    ref_h: float = 1e-4
    ref_retraction: str = "cay"
    quantities: tuple = ("energy", "casimir")
    out_dir: str = "results"
    prefix: str = ""
    newton_tol: float = 1e-12
    max_iter: int = 50

    def __post_init__(self):
        if self.system not in SYSTEM_NAMES:
            raise ConfigError(f"unknown system {self.system!r}; "
                              f"known: {SYSTEM_NAMES}")
        for label, m in (("method", self.method), ("ref_method", self.ref_method)):
            if m not in METHODS:
                raise ConfigError(f"unknown {label} {m!r}; known: {METHODS}")
        for label, r in (("retraction", self.retraction),
                         ("ref_retraction", self.ref_retraction)):
            if r not in RETRACTION_NAMES:
                raise ConfigError(f"unknown {label} {r!r}; "
                                  f"known: {RETRACTION_NAMES}")
        for label, v in (("h", self.h), ("t_final", self.t_final),
                         ("ref_h", self.ref_h), ("newton_tol", self.newton_tol)):
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise ConfigError(f"{label} must be a positive finite number, "
                                  f"got {v!r}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter}")
        if len(self.eta0) != 3:
            raise ConfigError("eta0 needs exactly 3 components")
        if len(self.inertia) != 3:
            raise ConfigError("inertia needs exactly 3 components")
        hs = tuple(float(x) for x in self.sweep_h)
        if any(not (x > 0 and math.isfinite(x)) for x in hs):
            raise ConfigError("sweep_h entries must be positive finite numbers")
        if any(a <= b for a, b in zip(hs, hs[1:])):
            raise ConfigError("sweep_h must be strictly decreasing")
        for q in self.quantities:
            _drift_extractor_name(q)  # raises ConfigError on bad names


def build_system(cfg: ExperimentConfig):
    params = RigidBodyParams(inertia=tuple(cfg.inertia), alpha=cfg.alpha,
                             beta=cfg.beta)
    if cfg.system == "free":
        return free_rigid_body(params)
    if cfg.system == "llg":
        return rigid_body_llg(params)
    return relaxed_rigid_body(params)


def _attach_step(exc, k, t):
    prefix = f"step {k} (t={t:.6g}): "
    if isinstance(exc, NonConvergence):
        return NonConvergence(prefix + str(exc), exc.iterations,
                              exc.residual_norm)
    return type(exc)(prefix + str(exc))


def run_trajectory(cfg: ExperimentConfig, system=None):
    """Integrate cfg.t_final at cfg.h; returns round(T/h)+1 records
    including the initial one.  Warns when T/h is not an integer."""
    n_exact = cfg.t_final / cfg.h
    n = int(round(n_exact))
    if abs(n_exact - n) > 1e-9 * max(1.0, abs(n_exact)):
        warnings.warn(
            f"t_final/h = {n_exact:.12g} is not an integer; "
            f"running {n} steps (T = {n * cfg.h:.12g})", stacklevel=2)
    if system is None:
        system = build_system(cfg)
    r = so3.get_retraction(cfg.retraction)
    tab = None if cfg.method == RK4_BASELINE else tableau(cfg.method)
    rec = initial_record(system, np.eye(3), np.asarray(cfg.eta0, dtype=float))
    records = [rec]
    guess = None
    for k in range(n):
        try:
            if tab is None:
                rec = rk4_baseline_step(system, cfg.h, rec)
            else:
                rec = step(system, tab, r, cfg.h, rec, guess=guess,
                           tol=cfg.newton_tol, max_iter=cfg.max_iter)
                guess = rec.stage_state.H
        except (NonConvergence, DomainError, SingularJacobian) as exc:
            raise _attach_step(exc, k, rec.t) from exc
        records.append(rec)
    return records


def reference_solution(cfg: ExperimentConfig, system=None):
    """Final reference momentum plus its self-consistency gap.

    Runs the reference method at ref_h and ref_h/2; the finer run is the
    reference, and the distance between the two bounds its own error.
    """
    coarse_cfg = replace(cfg, method=cfg.ref_method,
                         retraction=cfg.ref_retraction, h=cfg.ref_h)
    fine_cfg = replace(coarse_cfg, h=cfg.ref_h / 2.0)
    mu_coarse = run_trajectory(coarse_cfg, system)[-1].momentum
    mu_fine = run_trajectory(fine_cfg, system)[-1].momentum
    return mu_fine, float(np.linalg.norm(mu_coarse - mu_fine))


@dataclass(frozen=True)
class OrderSweep:
    method: str
    retraction: str
    hs: np.ndarray
    errors: np.ndarray
    components: np.ndarray
    local_slopes: np.ndarray
    fitted_slope: float
    reference_gap: float
    floor: float = ROUNDOFF_FLOOR

    def components_table(self):
        rows = [(self.hs[i], self.components[i, 0], self.components[i, 1],
                 self.components[i, 2]) for i in range(len(self.hs))]
        return Table(header=("h", "err_x", "err_y", "err_z"), rows=tuple(rows))


def order_sweep(cfg: ExperimentConfig, reference=None, system=None) -> OrderSweep:
    """Error of the final momentum against the reference across cfg.sweep_h.

    Non-converged step sizes are dropped from the table.  Reports consecutive
    log-log slopes and a least-squares slope over the errors above the
    roundoff floor; refuses to report when the reference's self-consistency
    gap is not below the smallest error above the floor.
    """
    if not cfg.sweep_h:
        raise ConfigError("order_sweep needs a non-empty sweep_h")
    if system is None:
        system = build_system(cfg)
    if reference is None:
        reference = reference_solution(cfg, system)
    mu_ref, gap = reference

    hs, errs, comps = [], [], []
    for h in cfg.sweep_h:
        try:
            mu = run_trajectory(replace(cfg, h=h), system)[-1].momentum
        except NonConvergence:
            continue
        hs.append(float(h))
        comps.append(np.abs(mu - mu_ref))
        errs.append(float(np.linalg.norm(mu - mu_ref)))
    hs = np.asarray(hs)
    errs = np.asarray(errs)
    comps = np.asarray(comps).reshape(len(hs), 3)

    slopes = np.full(len(hs), np.nan)
    for i in range(1, len(hs)):
        slopes[i] = (np.log(errs[i - 1] / errs[i])
                     / np.log(hs[i - 1] / hs[i]))

    meaningful = errs >= ROUNDOFF_FLOOR
    if meaningful.any() and gap >= errs[meaningful].min():
        raise NonConvergence(
            f"reference self-consistency gap {gap:.3e} is not below the "
            f"smallest measured error {errs[meaningful].min():.3e}; "
            "refine ref_h", iterations=0, residual_norm=gap)
    if meaningful.sum() >= 2:
        fitted = float(np.polyfit(np.log(hs[meaningful]),
                                  np.log(errs[meaningful]), 1)[0])
    else:
        fitted = float("nan")
    return OrderSweep(method=cfg.method, retraction=cfg.retraction, hs=hs,
                      errors=errs, components=comps, local_slopes=slopes,
                      fitted_slope=fitted, reference_gap=gap)


@dataclass(frozen=True)
class DriftSeries:
    quantity: str
    t: np.ndarray
    value: np.ndarray


def _drift_extractor_name(quantity):
    q = str(quantity).lower()
    if q in ("energy", "momentum", "casimir"):
        return q
    if q.startswith("casimir_"):
        suffix = q[len("casimir_"):]
        if suffix.isdigit():
            return q
    raise ConfigError(
        f"unknown drift quantity {quantity!r}; expected energy, casimir, "
        "casimir_<i>, or momentum")


def drift(records, quantity) -> DriftSeries:
    """Series of quantity(t_k) - quantity(t_0); `momentum` is the norm of the
    spatial momentum's deviation, exactly conserved by the free flow."""
    q = _drift_extractor_name(quantity)
    if not records:
        raise ConfigError("drift needs a non-empty record list")
    t = np.array([rec.t for rec in records])
    if q == "energy":
        value = np.array([rec.energy - records[0].energy for rec in records])
    elif q == "momentum":
        spatial0 = records[0].g @ records[0].momentum
        value = np.array(
            [np.linalg.norm(rec.g @ rec.momentum - spatial0) for rec in records])
    else:
        idx = 0 if q == "casimir" else int(q[len("casimir_"):])
        if idx >= len(records[0].casimirs):
            raise ConfigError(
                f"system has {len(records[0].casimirs)} casimir(s); "
                f"{quantity!r} is out of range")
        value = np.array(
            [rec.casimirs[idx] - records[0].casimirs[idx] for rec in records])
    return DriftSeries(quantity=q, t=t, value=value)


@dataclass(frozen=True)
class Table:
    header: tuple
    rows: tuple


def _format_cell(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.16e}"


def write_csv(path, data):
    """Serialize records / drift series / order sweeps / generic tables with
    a fixed schema, 17 significant digits, '.' decimals, '\\n' endings."""
    if isinstance(data, DriftSeries):
        header = ("t", "value")
        rows = zip(data.t, data.value)
    elif isinstance(data, OrderSweep):
        header = ("h", "error", "local_slope")
        rows = zip(data.hs, data.errors, data.local_slopes)
    elif isinstance(data, Table):
        header, rows = data.header, data.rows
    else:  # list of StepRecords
        header = ("t", "eta_x", "eta_y", "eta_z", "mu_x", "mu_y", "mu_z",
                  "energy", "casimir", "newton_iters", "residual")
        rows = ((rec.t, rec.eta[0], rec.eta[1], rec.eta[2], rec.momentum[0],
                 rec.momentum[1], rec.momentum[2], rec.energy,
                 rec.casimirs[0], int(rec.newton_iters), rec.residual)
                for rec in data)
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(x) for x in row) + "\n")


def read_csv(path):
    """Read a harness CSV back as {column: float array}."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = lines[0].split(",")
    cols = {name: [] for name in header}
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(header):
            raise ConfigError(f"malformed CSV row in {path}: {ln!r}")
        for name, cell in zip(header, cells):
            cols[name].append(float(cell))
    return {name: np.asarray(vals) for name, vals in cols.items()}
