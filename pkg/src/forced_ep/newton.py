"""Damped-free Newton iteration with forward-difference Jacobians.

The residual callable must broadcast over a leading batch axis; the Jacobian
is then assembled from one batched evaluation of n+1 points, which keeps the
per-step cost of the implicit integrators close to a handful of residual
evaluations.
"""

from __future__ import annotations

import numpy as np

from .errors import NonConvergence, SingularJacobian


def newton_solve(residual, x0, tol=1e-12, max_iter=50, fd_step=1e-7):
    """Solve residual(x) = 0 for flat x.

    Args:
        residual: callable mapping (..., n) -> (..., n)
        x0: initial guess, shape (n,)
        tol: convergence threshold on the max-norm of the residual
        max_iter: iteration cap
        fd_step: forward-difference step for the Jacobian

    Returns:
        (x, iterations, residual_norm)
    """
    x = np.asarray(x0, dtype=float).copy()
    n = x.size
    eye = np.eye(n)
    norm = np.inf
    for it in range(1, max_iter + 1):
        batch = np.concatenate([x[None, :], x[None, :] + fd_step * eye], axis=0)
        f_batch = residual(batch)
        f0 = f_batch[0]
        norm = float(np.max(np.abs(f0)))
        if norm <= tol:
            return x, it - 1, norm
        jac = (f_batch[1:] - f0[None, :]).T / fd_step
        try:
            dx = np.linalg.solve(jac, -f0)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(
                f"singular Jacobian in Newton iteration {it}: {exc}") from exc
        if not np.all(np.isfinite(dx)):
            raise SingularJacobian(f"non-finite Newton update at iteration {it}")
        x = x + dx
    f0 = residual(x[None, :])[0]
    norm = float(np.max(np.abs(f0)))
    if norm <= tol:
        return x, max_iter, norm
    raise NonConvergence(
        f"Newton failed to reach tol={tol:g} after {max_iter} iterations "
        f"(residual {norm:.3e})", max_iter, norm)
