"""Variationally partitioned Runge-Kutta-Munthe-Kaas integrators.

One step with tableau (a, b) and retraction tau solves, for stage algebra
velocities H_i and the given momentum lambda_k,

    Xi_i   = h sum_j a_ij H_j          (stage chart points)
    xi     = h sum_j b_j H_j           (step chart point)
    eta_i  = dltau(Xi_i, H_i)          (stage body velocities)
    Pi_i   = dltau*_{Xi_i} dl(eta_i)
    N_i    = dltau*_{Xi_i} f(eta_i)
    S_j    = [ddltau_{Xi_j}(H_j, .)]* Pi_j
    Lam_i  = dltau_inv*_{xi} ( Pi_i + h sum_j (b_j a_ji / b_i) S_j )

    0 = Lam_i - Ad*_{tau(xi)} [ lambda_k + h sum_j b_j dltau_inv*_{-Xi_j} N_j ]
             + h sum_j (b_j a_ji / b_i) dltau_inv*_{xi} N_j

followed by the momentum and group updates

    lambda_{k+1} = Ad*_{tau(xi)} [ lambda_k + h sum_j b_j dltau_inv*_{-Xi_j} N_j ]
    g_{k+1}      = g_k tau(xi).

These are the discrete Euler-Poincare equations of the stage-discretized
Hamilton-Pontryagin action; the test suite checks the residual against a
finite-difference gradient of that action, which pins every sign and index
above.  In the force-free case the update is exact coadjoint transport, so
Casimirs are conserved to roundoff regardless of the tableau.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import so3
from .errors import NonConvergence, UnknownTableau
from .newton import newton_solve

_EYE3 = np.eye(3)


@dataclass(frozen=True)
class ButcherTableau:
    name: str
    a: np.ndarray
    b: np.ndarray
    order: int

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.asarray(self.b, dtype=float)
        if a.shape != (b.size, b.size):
            raise ValueError(f"tableau {self.name}: a must be square matching b")
        if np.any(b == 0.0):
            raise ValueError(f"tableau {self.name}: all weights b_j must be nonzero")
        if abs(b.sum() - 1.0) > 1e-14:
            raise ValueError(f"tableau {self.name}: weights must sum to 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def stages(self):
        return self.b.size

    @property
    def c(self):
        return self.a.sum(axis=1)


def _make_tableaus():
    s3 = np.sqrt(3.0)
    s15 = np.sqrt(15.0)
    return {
        "gauss1": ButcherTableau("gauss1", [[0.5]], [1.0], 2),
        "gauss2": ButcherTableau(
            "gauss2",
            [[0.25, 0.25 - s3 / 6.0], [0.25 + s3 / 6.0, 0.25]],
            [0.5, 0.5], 4),
        "gauss3": ButcherTableau(
            "gauss3",
            [[5.0 / 36.0, 2.0 / 9.0 - s15 / 15.0, 5.0 / 36.0 - s15 / 30.0],
             [5.0 / 36.0 + s15 / 24.0, 2.0 / 9.0, 5.0 / 36.0 - s15 / 24.0],
             [5.0 / 36.0 + s15 / 30.0, 2.0 / 9.0 + s15 / 15.0, 5.0 / 36.0]],
            [5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0], 6),
        "lobatto2": ButcherTableau(
            "lobatto2", [[0.0, 0.0], [0.5, 0.5]], [0.5, 0.5], 2),
        "lobatto3": ButcherTableau(
            "lobatto3",
            [[0.0, 0.0, 0.0],
             [5.0 / 24.0, 1.0 / 3.0, -1.0 / 24.0],
             [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]],
            [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 4),
        "rk4": ButcherTableau(
            "rk4",
            [[0.0, 0.0, 0.0, 0.0],
             [0.5, 0.0, 0.0, 0.0],
             [0.0, 0.5, 0.0, 0.0],
             [0.0, 0.0, 1.0, 0.0]],
            [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0], 4),
    }


_TABLEAUS = _make_tableaus()

VARIATIONAL_METHODS = ("gauss1", "gauss2", "gauss3", "lobatto2", "lobatto3")


def tableau(name):
    try:
        return _TABLEAUS[str(name).lower()]
    except KeyError:
        raise UnknownTableau(
            f"unknown tableau {name!r}; shipped: {sorted(_TABLEAUS)}") from None


@dataclass
class StageState:
    """Converged per-stage quantities of a single step."""
    H: np.ndarray
    Xi: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    Pi: np.ndarray
    N: np.ndarray
    Lambda: np.ndarray


@dataclass
class StepRecord:
    """State and diagnostics after one step (or the initial condition)."""
    t: float
    g: np.ndarray
    eta: np.ndarray
    momentum: np.ndarray
    energy: float
    casimirs: tuple
    newton_iters: int = 0
    residual: float = 0.0
    stage_state: StageState | None = field(default=None, repr=False)


def initial_record(system, g0, eta0):
    eta0 = np.asarray(eta0, dtype=float)
    mu0 = system.dl(eta0)
    return StepRecord(
        t=0.0, g=np.asarray(g0, dtype=float), eta=eta0, momentum=mu0,
        energy=float(system.energy(eta0)),
        casimirs=tuple(float(c(mu0)) for c in system.casimirs))


def _stage_transport(system, tab, retraction, h, H):
    """Shared stage quantities for the residual and the update."""
    a, b = tab.a, tab.b
    Xi = h * np.einsum("ij,...jd->...id", a, H)
    xi = h * np.einsum("j,...jd->...d", b, H)
    eta = retraction.dltau(Xi, H)
    Pi = retraction.dltau_star(Xi, system.dl(eta))
    N = retraction.dltau_star(Xi, system.force(eta))
    # momentum reaching the right endpoint before coadjoint transport
    carried = np.asarray(
        h * np.einsum("j,...jd->...d", b, retraction.dltau_inv_star(-Xi, N)))
    return Xi, xi, eta, Pi, N, carried


def residual(system, tab, retraction, h, lambda_k, H):
    """Stage residuals, shape (..., s, 3); zero at the variational solution."""
    lambda_k = np.asarray(lambda_k, dtype=float)
    H = np.asarray(H, dtype=float)
    a, b = tab.a, tab.b
    Xi, xi, eta, Pi, N, carried = _stage_transport(system, tab, retraction, h, H)

    # S_j = adjoint of delta -> ddltau(Xi_j, H_j, delta), applied to Pi_j;
    # rows of `ddmat` along the basis give exactly that transpose.
    ddmat = retraction.ddltau(Xi[..., :, None, :], H[..., :, None, :], _EYE3)
    S = np.einsum("...jmn,...jn->...jm", ddmat, Pi)

    w = (b[:, None] * a) / b[None, :]      # w[j, i] = b_j a_ji / b_i
    Lam = retraction.dltau_inv_star(
        xi[..., None, :], Pi + h * np.einsum("ji,...jd->...id", w, S))

    transported = so3.Ad_star(retraction.tau(xi), lambda_k + carried)
    force_corr = h * np.einsum(
        "ji,...jd->...id", w, retraction.dltau_inv_star(xi[..., None, :], N))
    return Lam - transported[..., None, :] + force_corr


def _solve_stages(system, tab, retraction, h, lambda_k, H_guess, tol, max_iter):
    s = tab.stages

    def flat_residual(x):
        return residual(system, tab, retraction, h, lambda_k,
                        x.reshape(x.shape[:-1] + (s, 3))).reshape(x.shape)

    x, iters, res_norm = newton_solve(
        flat_residual, np.asarray(H_guess, dtype=float).reshape(-1),
        tol=tol, max_iter=max_iter)
    return x.reshape(s, 3), iters, res_norm


def step(system, tab, retraction, h, record, guess=None, tol=1e-12, max_iter=50):
    """Advance one step from `record`, returning the new StepRecord."""
    lambda_k = record.momentum
    s = tab.stages
    if guess is None:
        guess = np.tile(record.eta, (s, 1))
    try:
        H, iters, res_norm = _solve_stages(
            system, tab, retraction, h, lambda_k, guess, tol, max_iter)
    except NonConvergence:
        # explicit-Euler predictor along the Lie-Poisson flow, then retry
        from .systems import lie_poisson_rhs
        mu_dot = lie_poisson_rhs(system, lambda_k)
        c = tab.c
        predictor = np.stack(
            [system.legendre_inv(lambda_k + ci * h * mu_dot) for ci in c])
        H, iters, res_norm = _solve_stages(
            system, tab, retraction, h, lambda_k, predictor, tol, max_iter)

    Xi, xi, eta, Pi, N, carried = _stage_transport(system, tab, retraction, h, H)
    g_step = retraction.tau(xi)
    lambda_next = so3.Ad_star(g_step, lambda_k + carried)
    eta_next = system.legendre_inv(lambda_next)
    ddmat = retraction.ddltau(Xi[:, None, :], H[:, None, :], _EYE3)
    S = np.einsum("jmn,jn->jm", ddmat, Pi)
    w = (tab.b[:, None] * tab.a) / tab.b[None, :]
    Lam = retraction.dltau_inv_star(
        xi[None, :], Pi + h * np.einsum("ji,jd->id", w, S))
    return StepRecord(
        t=record.t + h,
        g=record.g @ g_step,
        eta=eta_next,
        momentum=lambda_next,
        energy=float(system.energy(eta_next)),
        casimirs=tuple(float(cas(lambda_next)) for cas in system.casimirs),
        newton_iters=iters,
        residual=res_norm,
        stage_state=StageState(H=H, Xi=Xi, xi=xi, eta=eta, Pi=Pi, N=N, Lambda=Lam))


def rk4_baseline_step(system, h, record):
    """Classical RK4 on the Lie-Poisson equations; not structure-preserving.

    The group is reconstructed with the weighted stage-average momentum, so
    the baseline produces comparable trajectory records.
    """
    from .systems import lie_poisson_rhs

    mu = record.momentum
    y1 = mu
    k1 = lie_poisson_rhs(system, y1)
    y2 = mu + 0.5 * h * k1
    k2 = lie_poisson_rhs(system, y2)
    y3 = mu + 0.5 * h * k2
    k3 = lie_poisson_rhs(system, y3)
    y4 = mu + h * k3
    k4 = lie_poisson_rhs(system, y4)
    mu_next = mu + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    mu_avg = (y1 + 2.0 * y2 + 2.0 * y3 + y4) / 6.0
    eta_next = system.legendre_inv(mu_next)
    g_next = record.g @ so3.CAYLEY.tau(h * system.legendre_inv(mu_avg))
    return StepRecord(
        t=record.t + h, g=g_next, eta=eta_next, momentum=mu_next,
        energy=float(system.energy(eta_next)),
        casimirs=tuple(float(cas(mu_next)) for cas in system.casimirs))
