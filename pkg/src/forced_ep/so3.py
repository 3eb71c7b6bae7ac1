"""Lie-algebraic kernel on SO(3).

Vectors in the algebra so(3) and its dual are plain ndarrays of shape
(..., 3); group elements are rotation matrices of shape (..., 3, 3).  All
maps broadcast over leading axes, which the implicit solvers exploit to
evaluate whole batches of stage residuals in one call.

Conventions:
    hat(u) v = u x v                (so hat(e1) e2 = e3)
    [u, v]   = u x v
    <mu, v>  = mu . v               (Euclidean pairing, ad-invariant)
    ad*_xi mu = mu x xi
    Ad_R xi  = R xi,  Ad*_R mu = R^T mu

Retractions tau (exponential and Cayley) come with their left-trivialized
tangent dltau, its inverse dltau_inv, and the derivatives of both in the
base point (ddltau, ddltau_inv).  The defining relations are

    d/dt tau(xi + t eta)|_0 = tau(xi) hat(dltau(xi, eta))
    d/dt dltau(xi + t delta, eta)|_0 = dltau(xi, ddltau(xi, eta, delta))
    d/dt dltau_inv(xi + t delta, eta)|_0 = ddltau_inv(xi, eta, delta)

Because the pairing is ad-invariant and both shipped tangent maps are
polynomials in hat(xi) and xi xi^T, the dual adjoint of dltau / dltau_inv
at xi is the same map evaluated at -xi; `dltau_star` and `dltau_inv_star`
rely on that and the test suite checks it against `adjoint_of`.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, DomainError

__all__ = [
    "hat", "vee", "pairing", "bracket", "ad_star", "Ad", "Ad_star",
    "adjoint_of", "project_to_group", "Retraction", "ExponentialRetraction",
    "CayleyRetraction", "EXP", "CAYLEY", "get_retraction",
]

_EYE3 = np.eye(3)


def hat(v):
    """Map a vector to the skew matrix acting as the cross product."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    out[..., 0, 1] = -z
    out[..., 0, 2] = y
    out[..., 1, 0] = z
    out[..., 1, 2] = -x
    out[..., 2, 0] = -y
    out[..., 2, 1] = x
    return out


def vee(m):
    """Inverse of `hat` (takes the skew part implicitly)."""
    m = np.asarray(m, dtype=float)
    return np.stack(
        [m[..., 2, 1], m[..., 0, 2], m[..., 1, 0]], axis=-1)


def pairing(mu, eta):
    mu = np.asarray(mu, dtype=float)
    eta = np.asarray(eta, dtype=float)
    return (mu * eta).sum(axis=-1)


def cross(a, b):
    """Cross product over the last axis; component arithmetic only, since
    ``np.cross``'s axis juggling dominates the integrator's hot path."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ax, ay, az = a[..., 0], a[..., 1], a[..., 2]
    bx, by, bz = b[..., 0], b[..., 1], b[..., 2]
    cx = ay * bz - az * by
    cy = az * bx - ax * bz
    cz = ax * by - ay * bx
    out = np.empty(cx.shape + (3,))
    out[..., 0] = cx
    out[..., 1] = cy
    out[..., 2] = cz
    return out


def bracket(xi, eta):
    return cross(xi, eta)


def ad_star(xi, mu):
    """Coadjoint action: <ad*_xi mu, eta> = <mu, [xi, eta]>."""
    return cross(mu, xi)


def Ad(g, xi):
    return np.einsum("...ij,...j->...i", np.asarray(g, dtype=float), xi)


def Ad_star(g, mu):
    """<Ad*_g mu, xi> = <mu, Ad_g xi>; on SO(3) this is g^T mu."""
    return np.einsum("...ji,...j->...i", np.asarray(g, dtype=float), mu)


def adjoint_of(linear_map, mu):
    """Apply the pairing-adjoint of a linear map on the algebra to mu.

    `linear_map` is either a (3, 3) matrix or a callable acting on single
    algebra vectors; the matrix is assembled column-by-column from the basis
    in the callable case.
    """
    if callable(linear_map):
        cols = [np.asarray(linear_map(_EYE3[i]), dtype=float) for i in range(3)]
        mat = np.stack(cols, axis=-1)
    else:
        mat = np.asarray(linear_map, dtype=float)
    return mat.T @ np.asarray(mu, dtype=float)


def project_to_group(g):
    """Nearest rotation by polar decomposition.  Never applied implicitly."""
    u, _, vt = np.linalg.svd(np.asarray(g, dtype=float))
    r = u @ vt
    det = np.linalg.det(r)
    if np.any(det < 0):
        u = u.copy()
        u[..., :, -1] *= np.where(det < 0, -1.0, 1.0)[..., None]
        r = u @ vt
    return r


# --- scalar coefficient functions -----------------------------------------
#
# Each takes theta^2 and switches to a truncated even series below
# theta = 0.1; the closed forms lose at most ~1e-13 relative accuracy at the
# switch point and the series truncation error there is below 1e-9 of the
# leading coefficient.

_SMALL = 0.01  # threshold on theta^2


def _safe(t):
    return np.where(t < _SMALL, 1.0, t)


def _sinc(t):
    # sin(theta)/theta
    th = np.sqrt(t)
    series = 1.0 - t / 6.0 + t * t / 120.0 - t ** 3 / 5040.0
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = np.sin(th) / np.sqrt(_safe(t))
    return np.where(t < _SMALL, series, closed)


def _cosc(t):
    # (1 - cos(theta))/theta^2
    th = np.sqrt(t)
    series = 0.5 - t / 24.0 + t * t / 720.0 - t ** 3 / 40320.0
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = (1.0 - np.cos(th)) / _safe(t)
    return np.where(t < _SMALL, series, closed)


def _b_coeff(t):
    # (theta - sin(theta))/theta^3
    th = np.sqrt(t)
    series = 1.0 / 6.0 - t / 120.0 + t * t / 5040.0 - t ** 3 / 362880.0
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = (th - np.sin(th)) / (np.sqrt(_safe(t)) * _safe(t))
    return np.where(t < _SMALL, series, closed)


def _c_coeff(t):
    # (1 - (theta/2) cot(theta/2)) / theta^2
    th = np.sqrt(t)
    series = 1.0 / 12.0 + t / 720.0 + t * t / 30240.0 + t ** 3 / 1209600.0
    with np.errstate(divide="ignore", invalid="ignore"):
        half = th / 2.0
        closed = (1.0 - half * np.cos(half) / np.sin(np.where(t < _SMALL, 1.0, half))) / _safe(t)
    return np.where(t < _SMALL, series, closed)


def _da_coeff(t):
    # d/dtheta[(1-cos)/theta^2] / theta
    th = np.sqrt(t)
    series = -1.0 / 12.0 + t / 180.0 - t * t / 6720.0
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = (th * np.sin(th) - 2.0 * (1.0 - np.cos(th))) / (_safe(t) * _safe(t))
    return np.where(t < _SMALL, series, closed)


def _db_coeff(t):
    # d/dtheta[(theta-sin)/theta^3] / theta
    th = np.sqrt(t)
    series = -1.0 / 60.0 + t / 1260.0 - t * t / 60480.0
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = (th * (1.0 - np.cos(th)) - 3.0 * (th - np.sin(th))) / (
            _safe(t) * _safe(t) * np.sqrt(_safe(t)))
    return np.where(t < _SMALL, series, closed)


def _dc_coeff(t):
    # d/dtheta[c(theta)] / theta   with c = (1 - (theta/2)cot(theta/2))/theta^2
    th = np.sqrt(t)
    series = 1.0 / 360.0 + t / 7560.0 + t * t / 201600.0
    with np.errstate(divide="ignore", invalid="ignore"):
        half = np.where(t < _SMALL, 1.0, th / 2.0)
        sin_h = np.sin(half)
        cot = np.cos(half) / sin_h
        u = half * cot                      # (theta/2) cot(theta/2)
        du = 0.5 * cot - (th / 4.0) * (1.0 + cot * cot)  # du/dtheta
        closed = (-du / _safe(t) - 2.0 * (1.0 - u) / (_safe(t) * np.sqrt(_safe(t)))) / np.sqrt(_safe(t))
    return np.where(t < _SMALL, series, closed)


def _log_factor(t):
    # theta / (2 sin(theta)), series for small theta
    th = np.sqrt(t)
    series = 0.5 + t / 12.0 + 7.0 * t * t / 720.0
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = th / (2.0 * np.sin(np.where(t < _SMALL, 1.0, th)))
    return np.where(t < _SMALL, series, closed)


# --- retractions -----------------------------------------------------------


class Retraction:
    """Local chart tau: so(3) -> SO(3) with tau(0) = I, tau(-xi) = tau(xi)^-1."""

    name = "abstract"
    domain_radius = np.inf

    def _check_domain(self, theta2):
        if np.any(theta2 > self.domain_radius ** 2):
            worst = float(np.sqrt(np.max(theta2)))
            raise DomainError(
                f"|xi| = {worst:.6g} outside {self.name} retraction domain "
                f"(radius {self.domain_radius:.6g})")

    def tau(self, xi):
        raise NotImplementedError

    def tau_inv(self, g):
        raise NotImplementedError

    def dltau(self, xi, eta):
        raise NotImplementedError

    def dltau_inv(self, xi, eta):
        raise NotImplementedError

    def ddltau(self, xi, eta, delta):
        raise NotImplementedError

    def ddltau_inv(self, xi, eta, delta):
        raise NotImplementedError

    # Dual adjoints.  Valid because the pairing is ad-invariant and the
    # shipped tangent maps are polynomials in hat(xi) and xi xi^T, so the
    # matrix transpose equals the map at -xi.
    def dltau_star(self, xi, mu):
        return self.dltau(np.negative(xi), mu)

    def dltau_inv_star(self, xi, mu):
        return self.dltau_inv(np.negative(xi), mu)


class ExponentialRetraction(Retraction):
    """Matrix exponential via the Rodrigues formula."""

    name = "exp"
    domain_radius = np.pi - 0.1

    def tau(self, xi):
        xi = np.asarray(xi, dtype=float)
        t = (xi * xi).sum(axis=-1)
        self._check_domain(t)
        k = hat(xi)
        a = _sinc(t)[..., None, None]
        b = _cosc(t)[..., None, None]
        return _EYE3 + a * k + b * (k @ k)

    def tau_inv(self, g):
        g = np.asarray(g, dtype=float)
        w = vee(g - np.swapaxes(g, -1, -2))          # 2 sin(theta) * axis
        s = 0.5 * np.sqrt((w * w).sum(axis=-1))      # sin(theta)
        tr = np.einsum("...ii->...", g)
        c = 0.5 * (tr - 1.0)                         # cos(theta)
        theta = np.arctan2(s, c)
        if np.any(theta > self.domain_radius):
            raise DomainError(
                f"rotation angle {float(np.max(theta)):.6g} outside exp chart "
                f"(radius {self.domain_radius:.6g})")
        return _log_factor(theta * theta)[..., None] * w

    def dltau(self, xi, eta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        t = (xi * xi).sum(axis=-1)
        self._check_domain(t)
        a = _cosc(t)[..., None]
        b = _b_coeff(t)[..., None]
        xe = cross(xi, eta)
        return eta - a * xe + b * cross(xi, xe)

    def dltau_inv(self, xi, eta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        t = (xi * xi).sum(axis=-1)
        self._check_domain(t)
        c = _c_coeff(t)[..., None]
        xe = cross(xi, eta)
        return eta + 0.5 * xe + c * cross(xi, xe)

    def ddltau(self, xi, eta, delta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        delta = np.asarray(delta, dtype=float)
        t = (xi * xi).sum(axis=-1)
        xd = (xi * delta).sum(axis=-1)[..., None]
        a = _cosc(t)[..., None]
        b = _b_coeff(t)[..., None]
        da = _da_coeff(t)[..., None]
        db = _db_coeff(t)[..., None]
        xe = cross(xi, eta)
        de = cross(delta, eta)
        dv = (-da * xd * xe - a * de
              + db * xd * cross(xi, xe)
              + b * (cross(delta, xe) + cross(xi, de)))
        return self.dltau_inv(xi, dv)

    def ddltau_inv(self, xi, eta, delta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        delta = np.asarray(delta, dtype=float)
        t = (xi * xi).sum(axis=-1)
        self._check_domain(t)
        xd = (xi * delta).sum(axis=-1)[..., None]
        c = _c_coeff(t)[..., None]
        dc = _dc_coeff(t)[..., None]
        xe = cross(xi, eta)
        de = cross(delta, eta)
        return (0.5 * de + dc * xd * cross(xi, xe)
                + c * (cross(delta, xe) + cross(xi, de)))


class CayleyRetraction(Retraction):
    """cay(xi) = (I - hat(xi)/2)^-1 (I + hat(xi)/2), rational in xi."""

    name = "cayley"
    domain_radius = 10.0

    def tau(self, xi):
        xi = np.asarray(xi, dtype=float)
        t = (xi * xi).sum(axis=-1)
        self._check_domain(t)
        k = hat(xi)
        f = (4.0 / (4.0 + t))[..., None, None]
        return _EYE3 + f * (k + 0.5 * (k @ k))

    def tau_inv(self, g):
        g = np.asarray(g, dtype=float)
        tr = np.einsum("...ii->...", g)
        denom = 1.0 + tr
        if np.any(denom <= 1e-12):
            raise DomainError("trace(g) too close to -1 for the Cayley chart")
        xi = (2.0 / denom)[..., None] * vee(g - np.swapaxes(g, -1, -2))
        self._check_domain((xi * xi).sum(axis=-1))
        return xi

    def dltau(self, xi, eta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        t = (xi * xi).sum(axis=-1)[..., None]
        return (4.0 * eta - 2.0 * cross(xi, eta)) / (4.0 + t)

    def dltau_inv(self, xi, eta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        dot = (xi * eta).sum(axis=-1)[..., None]
        return eta + 0.5 * cross(xi, eta) + 0.25 * dot * xi

    def ddltau(self, xi, eta, delta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        delta = np.asarray(delta, dtype=float)
        t = (xi * xi).sum(axis=-1)[..., None]
        xd = (xi * delta).sum(axis=-1)[..., None]
        w = self.dltau(xi, eta)
        dv = (-2.0 * cross(delta, eta) - 2.0 * xd * w) / (4.0 + t)
        return self.dltau_inv(xi, dv)

    def ddltau_inv(self, xi, eta, delta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        delta = np.asarray(delta, dtype=float)
        de = (delta * eta).sum(axis=-1)[..., None]
        xe = (xi * eta).sum(axis=-1)[..., None]
        return 0.5 * cross(delta, eta) + 0.25 * (de * xi + xe * delta)


EXP = ExponentialRetraction()
CAYLEY = CayleyRetraction()

_RETRACTIONS = {"exp": EXP, "cayley": CAYLEY, "cay": CAYLEY}


def get_retraction(name):
    try:
        return _RETRACTIONS[str(name).lower()]
    except KeyError:
        raise ConfigError(f"unknown retraction {name!r}; expected exp or cayley") from None
