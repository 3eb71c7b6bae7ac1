"""Forced Euler-Poincare systems on so(3) and their Lie-Poisson form.

A system is a reduced Lagrangian l on the algebra together with a force
field f: so(3) -> so(3)* and bookkeeping (Legendre transform, energy,
Casimir functions of the momentum).  The two shipped examples are the
Landau-Lifshitz-Gilbert damped rigid body and an energy-conserving
"relaxed" rigid body whose force grows the Casimir monotonically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NonConvergence, ParameterError
from .so3 import cross

Array = np.ndarray


@dataclass(frozen=True)
class ForcedEPSystem:
    """Reduced Lagrangian system with an external force on the dual algebra.

    All callables broadcast over leading axes of their (..., 3) inputs.

    Attributes:
        lagrangian: l(eta) -> (...,)
        dl: fiber derivative of l, so(3) -> so(3)*
        d2l: second fiber derivative as a (3, 3) matrix valued map
        legendre_inv: inverse of dl (momentum -> velocity)
        force: f(eta) -> so(3)*
        energy: E(eta) = <dl(eta), eta> - l(eta)
        casimirs: functions of the momentum conserved by the unforced flow
        force_dual: the force expressed on the Lie-Poisson side,
            f~(mu) = f(legendre_inv(mu))
    """

    name: str
    lagrangian: Callable[[Array], Array]
    dl: Callable[[Array], Array]
    d2l: Callable[[Array], Array]
    legendre_inv: Callable[[Array], Array]
    force: Callable[[Array], Array]
    casimirs: tuple = ()

    def energy(self, eta):
        eta = np.asarray(eta, dtype=float)
        return (self.dl(eta) * eta).sum(axis=-1) - self.lagrangian(eta)

    def force_dual(self, mu):
        return self.force(self.legendre_inv(mu))

    def hamiltonian(self, mu):
        return self.energy(self.legendre_inv(mu))


@dataclass(frozen=True)
class RigidBodyParams:
    inertia: tuple = (0.5, 2.0, 1.0)
    alpha: float = 1.0
    beta: float = 0.1

    def __post_init__(self):
        inertia = np.asarray(self.inertia, dtype=float)
        if inertia.shape != (3,) or np.any(inertia <= 0):
            raise ParameterError(
                f"inertia must be 3 positive principal moments, got {self.inertia!r}")
        object.__setattr__(self, "inertia", tuple(float(x) for x in inertia))


def _quadratic_pieces(inertia):
    imat = np.diag(np.asarray(inertia, dtype=float))
    iinv = np.diag(1.0 / np.asarray(inertia, dtype=float))

    def lagrangian(eta):
        eta = np.asarray(eta, dtype=float)
        return 0.5 * (eta * (eta @ imat.T)).sum(axis=-1)

    def dl(eta):
        return np.asarray(eta, dtype=float) @ imat.T

    def d2l(eta):
        return imat

    def legendre_inv(mu):
        return np.asarray(mu, dtype=float) @ iinv.T

    return lagrangian, dl, d2l, legendre_inv


def _momentum_norm_sq(mu):
    mu = np.asarray(mu, dtype=float)
    return (mu * mu).sum(axis=-1)


def free_rigid_body(params: RigidBodyParams | None = None) -> ForcedEPSystem:
    """Unforced rigid body: l = kinetic energy, f = 0."""
    params = params or RigidBodyParams()
    lag, dl, d2l, leg_inv = _quadratic_pieces(params.inertia)

    def force(eta):
        return np.zeros_like(np.asarray(eta, dtype=float))

    return ForcedEPSystem("free_rigid_body", lag, dl, d2l, leg_inv, force,
                          casimirs=(_momentum_norm_sq,))


def rigid_body_llg(params: RigidBodyParams | None = None) -> ForcedEPSystem:
    """Rigid body with Landau-Lifshitz-Gilbert double-bracket damping.

    f(Omega) = alpha * M x (M x Omega) with M = I Omega.  The force is
    dissipative (<f, Omega> <= 0) and tangent to the momentum sphere, so the
    flow decays the energy while conserving |M|^2.
    """
    params = params or RigidBodyParams()
    lag, dl, d2l, leg_inv = _quadratic_pieces(params.inertia)
    alpha = float(params.alpha)

    def force(eta):
        eta = np.asarray(eta, dtype=float)
        m = dl(eta)
        return alpha * cross(m, cross(m, eta))

    return ForcedEPSystem("rigid_body_llg", lag, dl, d2l, leg_inv, force,
                          casimirs=(_momentum_norm_sq,))


def relaxed_rigid_body(params: RigidBodyParams | None = None) -> ForcedEPSystem:
    """Rigid body with an energy-conserving, Casimir-growing force.

    f(Omega) = beta * (Omega x M) x Omega is orthogonal to Omega, so the
    energy is exactly conserved while d|mu|^2/dt = 2 beta |Omega x mu|^2 >= 0.
    """
    params = params or RigidBodyParams()
    lag, dl, d2l, leg_inv = _quadratic_pieces(params.inertia)
    beta = float(params.beta)

    def force(eta):
        eta = np.asarray(eta, dtype=float)
        m = dl(eta)
        return beta * cross(cross(eta, m), eta)

    return ForcedEPSystem("relaxed_rigid_body", lag, dl, d2l, leg_inv, force,
                          casimirs=(_momentum_norm_sq,))


def coadjoint_orbit_force(zeta: Callable[[Array], Array]) -> Callable[[Array], Array]:
    """Force of the form f~(mu) = ad*_{zeta(mu)} mu, tangent to coadjoint orbits.

    Returns a dual-side force field; wrap it into a system by composing with
    the Legendre transform if a velocity-side force is needed.
    """

    def force_dual(mu):
        mu = np.asarray(mu, dtype=float)
        return cross(mu, zeta(mu))

    return force_dual


def from_lagrangian(name: str,
                    lagrangian: Callable[[Array], Array],
                    force: Callable[[Array], Array],
                    casimirs: Sequence = (),
                    fd_step: float = 1e-6) -> ForcedEPSystem:
    """Build a system from a black-box Lagrangian by central differences.

    dl and d2l use step `fd_step`; legendre_inv solves dl(eta) = mu by
    Newton iteration on the numerical fiber derivative.
    """
    eye = np.eye(3)

    def dl(eta):
        eta = np.asarray(eta, dtype=float)
        cols = [(lagrangian(eta + fd_step * eye[i]) - lagrangian(eta - fd_step * eye[i]))
                / (2.0 * fd_step) for i in range(3)]
        return np.stack(cols, axis=-1)

    def d2l(eta):
        eta = np.asarray(eta, dtype=float)
        cols = [(dl(eta + fd_step * eye[i]) - dl(eta - fd_step * eye[i]))
                / (2.0 * fd_step) for i in range(3)]
        return np.stack(cols, axis=-1)

    # the FD fiber derivative carries ~eps/fd_step roundoff, so the Newton
    # residual cannot go below that floor
    newton_tol = max(1e-12, 5.0 * np.finfo(float).eps / fd_step)

    def legendre_inv(mu):
        mu = np.asarray(mu, dtype=float)
        eta = mu.copy()
        for _ in range(50):
            res = dl(eta) - mu
            if np.max(np.abs(res)) < newton_tol:
                return eta
            if eta.ndim == 1:
                eta = eta - np.linalg.solve(d2l(eta), res)
            else:
                eta = eta - np.linalg.solve(d2l(eta), res[..., None])[..., 0]
        raise NonConvergence("legendre_inv Newton failed", 50,
                             float(np.max(np.abs(dl(eta) - mu))))

    return ForcedEPSystem(name, lagrangian, dl, d2l, legendre_inv, force,
                          casimirs=tuple(casimirs))


def lie_poisson_rhs(system: ForcedEPSystem, mu):
    """mu_dot = ad*_{dh(mu)} mu + f~(mu) with dh = legendre_inv for regular l."""
    mu = np.asarray(mu, dtype=float)
    omega = system.legendre_inv(mu)
    return cross(mu, omega) + system.force_dual(mu)


def reconstruct(g, eta, h, retraction):
    """One reconstruction step g_{k+1} = g_k tau(h eta)."""
    return np.asarray(g, dtype=float) @ retraction.tau(h * np.asarray(eta, dtype=float))
