"""Discrete Euler-Lagrange machinery on pair states (V, U, W) in SO(3).

A forced step is encoded by a scalar discrete Lagrangian ld(V, U, W) on three
group copies: V advances the physical trajectory, W advances the duplicate,
and U joins the two chains.  Stationarity of the chain sum under variations
of both chains yields two covector equations per node plus the composition
constraint U_next = V^-1 U W; solving them step by step gives a flow whose
restriction to U = e reproduces the one-copy forced integrator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import so3
from .errors import ParameterError
from .newton import newton_solve

FD_STEP = 1e-5

_EYE3 = np.eye(3)


def lderiv(f: Callable, X: np.ndarray, retraction, step=FD_STEP):
    """Left-trivialized derivative of a scalar on the group:
    component a is d/dt f(X tau(t e_a)) at t = 0."""
    out = np.zeros(3)
    for c in range(3):
        e = step * _EYE3[c]
        out[c] = (f(X @ retraction.tau(e)) - f(X @ retraction.tau(-e))) / (2 * step)
    return out


def rderiv(f: Callable, X: np.ndarray, retraction, step=FD_STEP):
    """Right-trivialized derivative: component a is d/dt f(tau(t e_a) X)."""
    out = np.zeros(3)
    for c in range(3):
        e = step * _EYE3[c]
        out[c] = (f(retraction.tau(e) @ X) - f(retraction.tau(-e) @ X)) / (2 * step)
    return out


@dataclass(frozen=True)
class DiscreteState:
    V: np.ndarray
    U: np.ndarray
    W: np.ndarray


@dataclass(frozen=True)
class DiscreteLagrangian:
    """Scalar generating function of one forced step.

    value(V, U, W) -> float; antisymmetric marks the exchange identity
    value(W, U^-1, V) = -value(V, U, W), which forces the scheme's
    one-copy restriction to conserve what the free scheme conserves.
    """
    value: Callable[[np.ndarray, np.ndarray, np.ndarray], float]
    retraction: "so3.Retraction"
    h: float
    antisymmetric: bool = False


@dataclass(frozen=True)
class TrivializedDerivatives:
    """All six trivialized slot derivatives of ld at (V, U, W):
    lN = L*-type (curves X tau(t e)), rN = R*-type (curves tau(t e) X)."""
    l1: np.ndarray
    l2: np.ndarray
    l3: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray


def trivialized_derivatives(ld: DiscreteLagrangian, state: DiscreteState,
                            step=FD_STEP) -> TrivializedDerivatives:
    V, U, W = state.V, state.U, state.W
    r = ld.retraction
    return TrivializedDerivatives(
        l1=lderiv(lambda X: ld.value(X, U, W), V, r, step),
        l2=lderiv(lambda X: ld.value(V, X, W), U, r, step),
        l3=lderiv(lambda X: ld.value(V, U, X), W, r, step),
        r1=rderiv(lambda X: ld.value(X, U, W), V, r, step),
        r2=rderiv(lambda X: ld.value(V, X, W), U, r, step),
        r3=rderiv(lambda X: ld.value(V, U, X), W, r, step))


def _outgoing_covectors(ld: DiscreteLagrangian, state: DiscreteState,
                        step=FD_STEP):
    """The two covectors a step contributes to the node on its right:
    (L*_V D1 ld, L*_W D3 ld)."""
    V, U, W = state.V, state.U, state.W
    r = ld.retraction
    return (lderiv(lambda X: ld.value(X, U, W), V, r, step),
            lderiv(lambda X: ld.value(V, U, X), W, r, step))


def _incoming_covectors(ld: DiscreteLagrangian, state: DiscreteState,
                        step=FD_STEP):
    """The two covectors a step contributes to the node on its left:
    (R*_V D1 ld + R*_U D2 ld, R*_W D3 ld - L*_U D2 ld)."""
    V, U, W = state.V, state.U, state.W
    r = ld.retraction
    r1 = rderiv(lambda X: ld.value(X, U, W), V, r, step)
    r2 = rderiv(lambda X: ld.value(V, X, W), U, r, step)
    r3 = rderiv(lambda X: ld.value(V, U, X), W, r, step)
    l2 = lderiv(lambda X: ld.value(V, X, W), U, r, step)
    return r1 + r2, r3 - l2


def discrete_el_residual(ld: DiscreteLagrangian, prev: DiscreteState,
                         nxt: DiscreteState, step=FD_STEP):
    """Node residuals of the two-chain variational principle.

    res1 (physical chain):  L*_{V-} D1 ld(prev) - R*_{V} D1 ld(next) - R*_{U} D2 ld(next)
    res2 (duplicate chain): L*_{W-} D3 ld(prev) - R*_{W} D3 ld(next) + L*_{U} D2 ld(next)
    res3: the composition constraint U_next - V_prev^-1 U_prev W_prev.
    """
    out1, out2 = _outgoing_covectors(ld, prev, step)
    in1, in2 = _incoming_covectors(ld, nxt, step)
    res3 = nxt.U - prev.V.T @ prev.U @ prev.W
    return out1 - in1, out2 - in2, res3


def discrete_flow_step(ld: DiscreteLagrangian, prev: DiscreteState,
                       tol=1e-12, max_iter=100, fd_step=1e-7,
                       deriv_step=FD_STEP) -> DiscreteState:
    """Advance the two-chain flow one node.

    U_next is eliminated through the composition constraint; Newton runs on
    the 6 retraction coordinates of (V_next, W_next) around the previous
    state, driving res1 and res2 to zero.
    """
    r = ld.retraction
    U_next = prev.V.T @ prev.U @ prev.W
    out1, out2 = _outgoing_covectors(ld, prev, deriv_step)

    def build(x):
        v, w = x[:3], x[3:]
        return DiscreteState(prev.V @ r.tau(v), U_next, prev.W @ r.tau(w))

    def residual(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            in1, in2 = _incoming_covectors(ld, build(x), deriv_step)
            return np.concatenate([out1 - in1, out2 - in2])
        return np.stack([residual(row) for row in x])

    x0 = np.zeros(6)
    x, _, _ = newton_solve(residual, x0, tol=tol, max_iter=max_iter,
                           fd_step=fd_step)
    return build(x)


def discrete_legendre_minus(ld_free: Callable, W: np.ndarray, retraction,
                            step=FD_STEP):
    """Left-node momentum of a one-copy discrete Lagrangian: R*_W dld."""
    return rderiv(ld_free, W, retraction, step)


def discrete_legendre_plus(ld_free: Callable, W: np.ndarray, retraction,
                           step=FD_STEP):
    """Right-node momentum: L*_W dld; equals Ad*_W of the left-node one."""
    return lderiv(ld_free, W, retraction, step)


def discrete_ep_residual(ld_free: Callable, W1: np.ndarray, W2: np.ndarray,
                         retraction, step=FD_STEP):
    """One-copy discrete Euler-Poincare residual
    L*_{W1} dld - R*_{W2} dld for consecutive increments W1, W2."""
    return (lderiv(ld_free, W1, retraction, step)
            - rderiv(ld_free, W2, retraction, step))


def _stage_quantities(system, tableau, retraction, h, V, W):
    """Map pair increments (V, W) to the single-stage collocation data."""
    a11 = float(tableau.a[0, 0])
    b1 = float(tableau.b[0])
    xi = retraction.tau_inv(V)
    chi = retraction.tau_inv(W)
    H = xi / (h * b1)
    Psi = chi / (h * b1)
    Xi = (a11 / b1) * xi
    X = (a11 / b1) * chi
    eta = retraction.dltau(Xi, H)
    psi = retraction.dltau(X, Psi)
    return Xi, X, eta, psi


def make_rkmk_discrete_lagrangian(system, tableau, retraction,
                                  h) -> DiscreteLagrangian:
    """Exact pair discrete Lagrangian of the single-stage collocation method.

    ld(V, U, W) = h b1 [ l(psi) - l(eta) - k(eta, tau(-Xi) U tau(X), psi) ],
    k(eta, G, psi) = (<f(psi), tau_inv(G^-1)> - <f(eta), tau_inv(G)>)/2,
    with eta, psi the stage velocities generated by V, W.  Antisymmetric by
    construction.  Only one-stage tableaus can be written in closed form:
    multi-stage schemes define ld through an inner extremization.
    """
    if tableau.stages != 1:
        raise ParameterError(
            "a closed-form pair discrete Lagrangian needs a one-stage tableau; "
            f"got {tableau.stages} stages")
    b1 = float(tableau.b[0])

    def value(V, U, W):
        Xi, X, eta, psi = _stage_quantities(system, tableau, retraction, h, V, W)
        G = retraction.tau(-Xi) @ U @ retraction.tau(X)
        k = 0.5 * (so3.pairing(system.force(psi), retraction.tau_inv(G.T))
                   - so3.pairing(system.force(eta), retraction.tau_inv(G)))
        return float(h * b1 * (system.lagrangian(psi) - system.lagrangian(eta) - k))

    return DiscreteLagrangian(value=value, retraction=retraction, h=h,
                              antisymmetric=True)


def make_free_discrete_lagrangian(system, tableau, retraction, h) -> Callable:
    """One-copy discrete Lagrangian W -> h b1 l(eta(W)) of the free
    single-stage collocation method."""
    if tableau.stages != 1:
        raise ParameterError(
            "a closed-form discrete Lagrangian needs a one-stage tableau; "
            f"got {tableau.stages} stages")
    a11 = float(tableau.a[0, 0])
    b1 = float(tableau.b[0])

    def value(W):
        xi = retraction.tau_inv(W)
        eta = retraction.dltau((a11 / b1) * xi, xi / (h * b1))
        return float(h * b1 * system.lagrangian(eta))

    return value
