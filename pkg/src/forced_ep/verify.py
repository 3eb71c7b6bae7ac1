"""Independent correctness oracles for the integrator stack.

Every check here recomputes the claimed identity from a different route than
the implementation under test: tangent maps against finite differences of the
retraction itself, stage residuals against finite differences of the
duplicated discrete action, groupoid tangency against the continuous forced
equation, and the two-chain flow against the one-copy scheme.  The CLI
`verify` verb and the acceptance suite both run these.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import discrete, groupoid, so3
from .rkmk import (VARIATIONAL_METHODS, initial_record, residual as
                   rkmk_residual, step, tableau)
from .systems import lie_poisson_rhs, relaxed_rigid_body, rigid_body_llg

_EYE3 = np.eye(3)

DEFAULT_SEED = 20260819


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    detail: str

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail}"


def _rel(err, ref, floor=1e-8):
    return err / max(ref, floor)


# ---------------------------------------------------------------------------
# Kernel tangent-map oracles
# ---------------------------------------------------------------------------

def _fd_dltau(retraction, xi, eta, step=1e-5):
    """vee(tau(xi)^T d/dt tau(xi + t eta)) by central differences."""
    plus = retraction.tau(xi + step * eta)
    minus = retraction.tau(xi - step * eta)
    return so3.vee(retraction.tau(xi).T @ ((plus - minus) / (2 * step)))


def _fd_dltau_inv(retraction, xi, eta, step=1e-5):
    """Invert the finite-difference tangent matrix column by column; no
    closed-form tangent map is involved."""
    cols = np.stack([_fd_dltau(retraction, xi, _EYE3[c], step)
                     for c in range(3)], axis=-1)
    return np.linalg.solve(cols, eta)


def _fd_ddltau(retraction, xi, eta, delta, step=1e-5):
    """Central difference of xi -> dltau(xi, eta) along delta, pulled back
    through dltau to match the defining relation
    d/dt dltau(xi + t delta, eta) = dltau(xi, ddltau(xi, eta, delta))."""
    plus = retraction.dltau(xi + step * delta, eta)
    minus = retraction.dltau(xi - step * delta, eta)
    return retraction.dltau_inv(xi, (plus - minus) / (2 * step))


def _fd_ddltau_inv(retraction, xi, eta, delta, step=1e-5):
    plus = retraction.dltau_inv(xi + step * delta, eta)
    minus = retraction.dltau_inv(xi - step * delta, eta)
    return (plus - minus) / (2 * step)


def check_kernel_tangents(n_samples=100, seed=DEFAULT_SEED, tol=1e-5,
                          ad_tol=1e-10) -> list[CheckResult]:
    """Finite-difference validation of dltau / ddltau / ddltau_inv and the
    exact identity Ad_{tau(xi)}^-1 = dltau_xi o dltau_inv_{-xi}."""
    rng = np.random.default_rng(seed)
    results = []
    for name in ("exp", "cay"):
        r = so3.get_retraction(name)
        radius = min(2.0, 0.8 * r.domain_radius)
        worst_d = worst_di = worst_dd = worst_ddi = worst_ad = 0.0
        for _ in range(n_samples):
            xi = rng.uniform(-1.0, 1.0, 3)
            xi *= rng.uniform(0.05, radius) / np.linalg.norm(xi)
            eta = rng.normal(size=3)
            delta = rng.normal(size=3)

            d_err = np.linalg.norm(r.dltau(xi, eta) - _fd_dltau(r, xi, eta))
            worst_d = max(worst_d, _rel(d_err, np.linalg.norm(eta)))

            di_err = np.linalg.norm(r.dltau_inv(xi, eta)
                                    - _fd_dltau_inv(r, xi, eta))
            worst_di = max(worst_di, _rel(di_err, np.linalg.norm(eta)))

            dd = r.ddltau(xi, eta, delta)
            dd_err = np.linalg.norm(dd - _fd_ddltau(r, xi, eta, delta))
            scale = np.linalg.norm(eta) * np.linalg.norm(delta)
            worst_dd = max(worst_dd, _rel(dd_err, scale))

            ddi = r.ddltau_inv(xi, eta, delta)
            ddi_err = np.linalg.norm(ddi - _fd_ddltau_inv(r, xi, eta, delta))
            worst_ddi = max(worst_ddi, _rel(ddi_err, scale))

            lhs = so3.Ad(np.linalg.inv(r.tau(xi)), eta)
            rhs = r.dltau(xi, r.dltau_inv(-xi, eta))
            worst_ad = max(worst_ad,
                           _rel(np.linalg.norm(lhs - rhs), np.linalg.norm(eta)))
        ok = (worst_d <= tol and worst_di <= tol and worst_dd <= tol
              and worst_ddi <= tol)
        results.append(CheckResult(
            name=f"kernel-tangents-{name}", passed=ok,
            worst=max(worst_d, worst_di, worst_dd, worst_ddi),
            detail=(f"worst rel err dltau={worst_d:.2e} "
                    f"dltau_inv={worst_di:.2e} ddltau={worst_dd:.2e} "
                    f"ddltau_inv={worst_ddi:.2e} (tol {tol:.0e}, "
                    f"{n_samples} samples)")))
        results.append(CheckResult(
            name=f"kernel-ad-identity-{name}", passed=worst_ad <= ad_tol,
            worst=worst_ad,
            detail=f"worst rel err {worst_ad:.2e} (tol {ad_tol:.0e})"))
    return results


# ---------------------------------------------------------------------------
# Variational consistency: stage residuals vs the duplicated discrete action
# ---------------------------------------------------------------------------

def duplicated_action(system, tab, retraction, h, H, Psi):
    """Duplicated discrete action of one step started on the identity section.

    A(H, Psi) = h sum_i b_i [ l(psi_i) - l(eta_i) - k(eta_i, U_i, psi_i) ],
    where eta_i, psi_i are the stage velocities generated by the two stage
    families, U_i = tau(-Xi_i) tau(X_i) joins the chains, and
    k(eta, G, psi) = (<f(psi), tau_inv(G^-1)> - <f(eta), tau_inv(G)>)/2.
    """
    a, b = tab.a, tab.b
    Xi = h * np.einsum("ij,jd->id", a, H)
    X = h * np.einsum("ij,jd->id", a, Psi)
    eta = retraction.dltau(Xi, H)
    psi = retraction.dltau(X, Psi)
    total = 0.0
    for i in range(tab.stages):
        U_i = retraction.tau(-Xi[i]) @ retraction.tau(X[i])
        k = 0.5 * (so3.pairing(system.force(psi[i]), retraction.tau_inv(U_i.T))
                   - so3.pairing(system.force(eta[i]), retraction.tau_inv(U_i)))
        total += b[i] * (system.lagrangian(psi[i]) - system.lagrangian(eta[i]) - k)
    return float(h * total)


def action_gradient_residual(system, tab, retraction, h, lam_k, H,
                             fd_step=1e-6):
    """Stage residuals recomputed from finite differences of the action.

    For each stage m the multiplier implied by stationarity is
    (1/(h b_m)) dA/dH_m (partial, duplicate family frozen at Psi = H); the
    multiplier implied by the left-node variation is
    (dltau_{-xi})*[-lam_k - h sum_i b_i Ad*_{tau(X_i)^-1} gamma_i], with
    gamma_i the trivialized group-slot derivative of the stage integrand.
    Their mismatch, pulled through (dltau_inv_xi)*, is the stage residual.
    Returns (residuals (s,3), node multiplier, per-stage multipliers).
    """
    tab_a, b = tab.a, tab.b
    s = tab.stages
    H = np.asarray(H, dtype=float)
    Psi = H.copy()
    xi = h * np.einsum("j,jd->d", b, H)

    lam_bar = np.zeros((s, 3))
    for m in range(s):
        for c in range(3):
            Hp = H.copy()
            Hp[m, c] += fd_step
            Hm = H.copy()
            Hm[m, c] -= fd_step
            lam_bar[m, c] = (
                duplicated_action(system, tab, retraction, h, Hp, Psi)
                - duplicated_action(system, tab, retraction, h, Hm, Psi)
            ) / (2 * fd_step)
        lam_bar[m] /= h * b[m]

    # group-slot derivatives gamma_i of the stage integrand, by central
    # differences along U tau(t e_c)
    Xi = h * np.einsum("ij,jd->id", tab_a, H)
    eta = retraction.dltau(Xi, H)
    psi = eta.copy()
    gamma = np.zeros((s, 3))
    for i in range(s):
        f_psi = system.force(psi[i])
        f_eta = system.force(eta[i])
        U_i = retraction.tau(-Xi[i]) @ retraction.tau(Xi[i])

        def integrand(U):
            return 0.5 * (so3.pairing(f_psi, retraction.tau_inv(U.T))
                          - so3.pairing(f_eta, retraction.tau_inv(U)))

        for c in range(3):
            e = fd_step * _EYE3[c]
            gamma[i, c] = -(integrand(U_i @ retraction.tau(e))
                            - integrand(U_i @ retraction.tau(-e))) / (2 * fd_step)

    acc = np.array(lam_k, dtype=float)
    for i in range(s):
        acc = acc + h * b[i] * (retraction.tau(Xi[i]) @ gamma[i])
    node_bar = retraction.dltau_star(-xi, -acc)

    residuals = np.stack(
        [retraction.dltau_inv_star(xi, node_bar - lam_bar[m]) for m in range(s)])
    return residuals, node_bar, lam_bar


def check_action_gradient(methods=None, h=0.05, tol=1e-6,
                          seed=DEFAULT_SEED) -> list[CheckResult]:
    """Compare implemented stage residuals against the action-gradient oracle
    for every (method, system, retraction) combination, both at the converged
    step and at a perturbed non-solution."""
    if methods is None:
        methods = tuple(VARIATIONAL_METHODS) + ("rk4",)
    systems = (("llg", rigid_body_llg()), ("relaxed", relaxed_rigid_body()))
    rng = np.random.default_rng(seed)
    eta0 = np.array([1.0, 0.0, 1.0]) / np.sqrt(2.0)
    results = []
    for method in methods:
        tab = tableau(method)
        for sys_name, system in systems:
            for ret_name in ("cay", "exp"):
                r = so3.get_retraction(ret_name)
                lam_k = np.asarray(system.dl(eta0), dtype=float)
                rec0 = initial_record(system, np.eye(3), eta0)
                rec1 = step(system, tab, r, h, rec0)
                H_star = rec1.stage_state.H
                scale = np.linalg.norm(lam_k)

                res_conv, _, lam_bar = action_gradient_residual(
                    system, tab, r, h, lam_k, H_star)
                rel_conv = np.linalg.norm(res_conv) / scale

                lam_next_oracle = -r.dltau_inv_star(
                    h * np.einsum("j,jd->d", tab.b, H_star), lam_bar[0])
                rel_update = (np.linalg.norm(lam_next_oracle - rec1.momentum)
                              / scale)

                H_pert = H_star + 0.1 * rng.normal(size=H_star.shape)
                res_oracle, _, _ = action_gradient_residual(
                    system, tab, r, h, lam_k, H_pert)
                res_impl = rkmk_residual(
                    system, tab, r, h, lam_k, H_pert).reshape(res_oracle.shape)
                rel_pert = (np.linalg.norm(res_impl - res_oracle)
                            / (np.linalg.norm(res_oracle) + scale))

                worst = max(rel_conv, rel_update, rel_pert)
                results.append(CheckResult(
                    name=f"action-gradient-{method}-{sys_name}-{ret_name}",
                    passed=worst <= tol, worst=worst,
                    detail=(f"rel err converged={rel_conv:.2e} "
                            f"update={rel_update:.2e} perturbed={rel_pert:.2e} "
                            f"(tol {tol:.0e})")))
    return results


# ---------------------------------------------------------------------------
# Groupoid tangency
# ---------------------------------------------------------------------------

def check_groupoid_tangency(n_samples=100, seed=DEFAULT_SEED,
                            tol_tangent=1e-10, tol_field=1e-8) -> list[CheckResult]:
    """On the identity section the Hamiltonian field of h_f must have zero
    group component (tangency), equal momentum components, and momentum
    components equal to the forced Lie-Poisson right-hand side."""
    rng = np.random.default_rng(seed)
    results = []
    for sys_name, system in (("llg", rigid_body_llg()),
                             ("relaxed", relaxed_rigid_body())):
        r = so3.get_retraction("cay")
        worst_u = worst_eq = worst_rhs = 0.0
        for _ in range(n_samples):
            mu = rng.normal(size=3)
            mu = mu / np.linalg.norm(mu) * rng.uniform(0.3, 2.0)
            p = groupoid.identity_of(mu)
            field = groupoid.hamiltonian_vector_field(system, p, r)
            rhs = lie_poisson_rhs(system, mu)
            scale = max(np.linalg.norm(rhs), 1.0)
            worst_u = max(worst_u, np.linalg.norm(field.U_dot))
            worst_eq = max(worst_eq,
                           np.linalg.norm(field.lam_dot - field.mu_dot))
            worst_rhs = max(worst_rhs,
                            np.linalg.norm(field.mu_dot - rhs) / scale)
        results.append(CheckResult(
            name=f"groupoid-tangency-{sys_name}",
            passed=(worst_u <= tol_tangent and worst_eq <= tol_tangent
                    and worst_rhs <= tol_field),
            worst=max(worst_u, worst_eq, worst_rhs),
            detail=(f"worst |U_dot|={worst_u:.2e}, "
                    f"worst |lam_dot-mu_dot|={worst_eq:.2e} "
                    f"(tol {tol_tangent:.0e}), "
                    f"worst rel rhs mismatch={worst_rhs:.2e} "
                    f"(tol {tol_field:.0e}, {n_samples} samples)")))
    return results


# ---------------------------------------------------------------------------
# Restriction of the two-chain flow to the identity section
# ---------------------------------------------------------------------------

def check_restriction(n_steps=100, h=0.01, tol=1e-9,
                      method="gauss1", retraction_name="cay") -> list[CheckResult]:
    """Drive the two-chain discrete flow from identity-section data and
    confirm the joining element stays at the identity: max ||tau_inv(U_k)||
    over the trajectory must vanish to tolerance."""
    system = rigid_body_llg()
    tab = tableau(method)
    r = so3.get_retraction(retraction_name)
    ld = discrete.make_rkmk_discrete_lagrangian(system, tab, r, h)

    eta0 = np.array([1.0, 0.0, 1.0]) / np.sqrt(2.0)
    rec = initial_record(system, np.eye(3), eta0)
    rec = step(system, tab, r, h, rec)
    xi0 = h * np.einsum("j,jd->d", tab.b, rec.stage_state.H)
    V0 = r.tau(xi0)
    state = discrete.DiscreteState(V=V0, U=np.eye(3), W=V0.copy())

    worst = 0.0
    for _ in range(n_steps):
        state = discrete.discrete_flow_step(ld, state)
        worst = max(worst, float(np.linalg.norm(r.tau_inv(state.U))))
    return [CheckResult(
        name="two-chain-restriction", passed=worst <= tol, worst=worst,
        detail=(f"max ||tau_inv(U_k)|| = {worst:.2e} over {n_steps} steps "
                f"(tol {tol:.0e})"))]


def run_all(fast=False) -> list[CheckResult]:
    """Full oracle battery; fast=True trims sample counts for smoke runs."""
    n = 20 if fast else 100
    steps = 20 if fast else 100
    methods = ("gauss1", "lobatto2") if fast else None
    results = []
    results += check_kernel_tangents(n_samples=n)
    results += check_action_gradient(methods=methods)
    results += check_groupoid_tangency(n_samples=n)
    results += check_restriction(n_steps=steps)
    return results
