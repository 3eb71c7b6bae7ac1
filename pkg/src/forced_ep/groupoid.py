"""The Poisson groupoid so(3)* x SO(3) x so(3)* behind the forced schemes.

Points (lam, U, mu) carry two momenta joined by a group element.  The
identity section {(mu, e, mu)} is where forced Lie-Poisson dynamics lives:
the Hamiltonian vector field of h_f(lam, U, mu) = h(mu) - h(lam) + k_f is
tangent to the section and restricts there to mu_dot = ad*_{dh} mu + f~(mu).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import so3

FD_STEP = 1e-5

_EYE3 = np.eye(3)


@dataclass(frozen=True)
class GroupoidPoint:
    lam: np.ndarray
    U: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", np.asarray(self.lam, dtype=float))
        object.__setattr__(self, "U", np.asarray(self.U, dtype=float))
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=float))


@dataclass(frozen=True)
class GroupoidGradient:
    """Differential of a scalar: algebra-valued in the momenta slots, the
    left-trivialized cotangent L*_U dF in the group slot."""
    d_lam: np.ndarray
    d_U: np.ndarray
    d_mu: np.ndarray


@dataclass(frozen=True)
class GroupoidTangent:
    """Tangent vector with the group component left-trivialized."""
    lam_dot: np.ndarray
    U_dot: np.ndarray
    mu_dot: np.ndarray


def source(p: GroupoidPoint):
    return p.mu


def target(p: GroupoidPoint):
    return p.lam


def identity_of(mu):
    mu = np.asarray(mu, dtype=float)
    return GroupoidPoint(mu, np.eye(3), mu)


def inverse(p: GroupoidPoint):
    return GroupoidPoint(p.mu, p.U.T, p.lam)


def multiply(p: GroupoidPoint, q: GroupoidPoint, tol=1e-12):
    if np.max(np.abs(p.mu - q.lam)) > tol:
        raise ValueError("groupoid multiplication requires source(p) == target(q)")
    return GroupoidPoint(p.lam, p.U @ q.U, q.mu)


def poisson_bracket(grad_a: GroupoidGradient, grad_b: GroupoidGradient,
                    p: GroupoidPoint):
    """Evaluate the groupoid Poisson bracket on two gradients at p."""
    ad_b_lam = so3.Ad(p.U.T, grad_b.d_lam)
    ad_a_lam = so3.Ad(p.U.T, grad_a.d_lam)
    return float(
        -so3.pairing(p.mu, so3.bracket(grad_a.d_mu, grad_b.d_mu))
        + so3.pairing(p.lam, so3.bracket(grad_a.d_lam, grad_b.d_lam))
        + so3.pairing(grad_a.d_U, grad_b.d_mu + ad_b_lam)
        - so3.pairing(grad_b.d_U, grad_a.d_mu + ad_a_lam))


def k_force(force_dual, p: GroupoidPoint, retraction):
    """Discrete forcing potential on the groupoid.

    k(lam, U, mu) = (<f~(mu), tau_inv(U^-1)> - <f~(lam), tau_inv(U)>) / 2;
    antisymmetric under groupoid inversion and with left-trivialized
    U-gradient -f~(mu) on the identity section.
    """
    xi = retraction.tau_inv(p.U)
    xi_inv = retraction.tau_inv(p.U.T)
    return 0.5 * float(
        so3.pairing(force_dual(p.mu), xi_inv) - so3.pairing(force_dual(p.lam), xi))


def forced_hamiltonian(system, p: GroupoidPoint, retraction):
    """h_f(lam, U, mu) = h(mu) - h(lam) + k_f(lam, U, mu)."""
    return float(system.hamiltonian(p.mu) - system.hamiltonian(p.lam)
                 + k_force(system.force_dual, p, retraction))


def hamiltonian_gradient(system, p: GroupoidPoint, retraction,
                         fd_step=FD_STEP) -> GroupoidGradient:
    """Gradient of h_f: analytic in the quadratic part, central differences
    in the forcing potential."""

    def k_of(lam, U, mu):
        return k_force(system.force_dual, GroupoidPoint(lam, U, mu), retraction)

    d_lam = -np.asarray(system.legendre_inv(p.lam), dtype=float)
    d_mu = np.asarray(system.legendre_inv(p.mu), dtype=float)
    d_U = np.zeros(3)
    for c in range(3):
        e = fd_step * _EYE3[c]
        d_lam[c] += (k_of(p.lam + e, p.U, p.mu) - k_of(p.lam - e, p.U, p.mu)) / (2 * fd_step)
        d_mu[c] += (k_of(p.lam, p.U, p.mu + e) - k_of(p.lam, p.U, p.mu - e)) / (2 * fd_step)
        d_U[c] = (k_of(p.lam, p.U @ retraction.tau(e), p.mu)
                  - k_of(p.lam, p.U @ retraction.tau(-e), p.mu)) / (2 * fd_step)
    return GroupoidGradient(d_lam=d_lam, d_U=d_U, d_mu=d_mu)


def hamiltonian_vector_field(system, p: GroupoidPoint, retraction,
                             fd_step=FD_STEP) -> GroupoidTangent:
    """X_{h_f} at p, with the group velocity left-trivialized.

    lam_dot = -ad*_{dh/dlam} lam - R*_U dh/dU
    mu_dot  =  ad*_{dh/dmu} mu  - L*_U dh/dU
    U_dot   =  U (dh/dmu + Ad_{U^-1} dh/dlam)
    """
    grad = hamiltonian_gradient(system, p, retraction, fd_step)
    right_u = p.U @ grad.d_U          # Ad*_{U^-1} of the left-trivialized slot
    return GroupoidTangent(
        lam_dot=-so3.ad_star(grad.d_lam, p.lam) - right_u,
        U_dot=grad.d_mu + so3.Ad(p.U.T, grad.d_lam),
        mu_dot=so3.ad_star(grad.d_mu, p.mu) - grad.d_U)
