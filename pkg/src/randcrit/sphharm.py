"""Real spherical-harmonic evaluation with first and second derivatives.

Degree-n real orthonormal basis, evaluated together with the surface
gradient and the Levi-Civita Hessian in a local orthonormal tangent frame.
Coordinate-pole trouble is avoided by evaluating every point in one of
three rotated frames (polar axis z, x or y, whichever keeps the point
nearest the equator, so sin(theta) >= sqrt(2/3) always); the coefficient
vectors in the rotated frames come from exact quadrature-built rotation
matrices.

Coefficient ordering: index 0 is m = 0, then (cos m, sin m) pairs for
m = 1..n, giving 2n + 1 coefficients.
"""

from __future__ import annotations

from math import pi, sqrt

import numpy as np

from .exceptions import ParameterError

# rotations taking the x-axis / y-axis to the polar axis
_AX = np.array([[0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
_AY = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
_SYSTEMS = (np.eye(3), _AX, _AY)


def legendre_eval(n: int, t):
    """(P_n, P_n', P_n'') by the three-term recurrence carried jointly for
    the value and both derivatives; exact at t = +-1."""
    if n < 0:
        raise ParameterError(f"degree must be >= 0, got {n}")
    t = np.asarray(t, dtype=float)
    p_prev, dp_prev, ddp_prev = np.ones_like(t), np.zeros_like(t), np.zeros_like(t)
    if n == 0:
        return p_prev, dp_prev, ddp_prev
    p, dp, ddp = t.copy(), np.ones_like(t), np.zeros_like(t)
    for k in range(1, n):
        p_next = ((2 * k + 1) * t * p - k * p_prev) / (k + 1)
        dp_next = ((2 * k + 1) * (p + t * dp) - k * dp_prev) / (k + 1)
        ddp_next = ((2 * k + 1) * (2 * dp + t * ddp) - k * ddp_prev) / (k + 1)
        p_prev, dp_prev, ddp_prev = p, dp, ddp
        p, dp, ddp = p_next, dp_next, ddp_next
    return p, dp, ddp


def theta_functions(n: int, theta: np.ndarray):
    """Normalized associated Legendre parts Theta_n^m(theta) for m = 0..n,
    with first and second theta-derivatives; shapes (n+1, ...).

    Theta_n^m carries the Condon-Shortley phase and is normalized so that
    Theta_n^m(theta) e^{i m phi} is an orthonormal basis of the degree-n
    eigenspace.  Derivatives use the ladder
        d/dtheta Theta^m = (c+(m) Theta^{m+1} - c-(m) Theta^{m-1}) / 2,
    c+(m) = sqrt((n-m)(n+m+1)), c-(m) = sqrt((n+m)(n-m+1)), with
    Theta^{-m} = (-1)^m Theta^m.
    """
    theta = np.asarray(theta, dtype=float)
    ct, st = np.cos(theta), np.sin(theta)
    P = np.zeros((n + 1,) + theta.shape)
    # sectoral seed walked up in degree for each order m
    seed = np.full_like(theta, sqrt(1.0 / (4.0 * pi)))
    for m in range(n + 1):
        if m > 0:
            seed = -sqrt((2 * m + 1.0) / (2.0 * m)) * st * seed
        if m == n:
            P[m] = seed
            break
        prev, cur = seed, sqrt(2 * m + 3.0) * ct * seed
        for l in range(m + 2, n + 1):
            a = sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            prev, cur = cur, a * (ct * cur - b * prev)
        P[m] = cur if n > m else prev

    def get(mm):
        if abs(mm) > n:
            return 0.0
        return P[mm] if mm >= 0 else (-1.0) ** mm * P[-mm]

    def cp(mm):
        return sqrt(max((n - mm) * (n + mm + 1.0), 0.0))

    def cm(mm):
        return sqrt(max((n + mm) * (n - mm + 1.0), 0.0))

    dP = np.zeros_like(P)
    ddP = np.zeros_like(P)
    for m in range(n + 1):
        dP[m] = 0.5 * (cp(m) * get(m + 1) - cm(m) * get(m - 1))
        ddP[m] = 0.25 * (
            cp(m) * (cp(m + 1) * get(m + 2) - cm(m + 1) * get(m))
            - cm(m) * (cp(m - 1) * get(m) - cm(m - 1) * get(m - 2))
        )
    return P, dP, ddP


def basis_values(n: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Real orthonormal basis values, shape (2n+1, ...)."""
    P, _, _ = theta_functions(n, theta)
    out = np.empty((2 * n + 1,) + np.asarray(theta).shape)
    out[0] = P[0]
    for m in range(1, n + 1):
        fac = sqrt(2.0) * (-1.0) ** m * P[m]
        out[2 * m - 1] = fac * np.cos(m * phi)
        out[2 * m] = fac * np.sin(m * phi)
    return out


def _rotation_matrix(n: int, A: np.ndarray) -> np.ndarray:
    """Matrix T with Ybasis(A^{-1} q) = T Ybasis(q), built by exact
    Gauss-Legendre x uniform-phi quadrature (integrands are degree <= 2n)."""
    x, w = np.polynomial.legendre.leggauss(n + 1)
    n_phi = 2 * n + 2
    phi = 2.0 * pi * np.arange(n_phi) / n_phi
    theta = np.arccos(x)
    TH, PH = np.meshgrid(theta, phi, indexing="ij")
    W = np.repeat(w[:, None], n_phi, axis=1) * (2.0 * pi / n_phi)
    q = np.stack(
        [np.sin(TH) * np.cos(PH), np.sin(TH) * np.sin(PH), np.cos(TH)], axis=-1
    )
    B = basis_values(n, TH.ravel(), PH.ravel())
    q_rot = q.reshape(-1, 3) @ A  # rows A^{-1} q = A^T q
    th_r = np.arccos(np.clip(q_rot[:, 2], -1.0, 1.0))
    ph_r = np.arctan2(q_rot[:, 1], q_rot[:, 0])
    B_rot = basis_values(n, th_r, ph_r)
    return (B_rot * W.ravel()) @ B.T


_rotation_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def rotated_coefficients(n: int, coeffs: np.ndarray) -> tuple[np.ndarray, ...]:
    """Coefficient vectors of the same function in the three frames."""
    mats = _rotation_cache.get(n)
    if mats is None:
        mats = (_rotation_matrix(n, _AX), _rotation_matrix(n, _AY))
        _rotation_cache[n] = mats
    return coeffs, mats[0].T @ coeffs, mats[1].T @ coeffs


def evaluate(n: int, coeffs: np.ndarray, points: np.ndarray, order: int = 2):
    """Evaluate u and its surface derivatives at unit vectors.

    Args:
        n: degree.
        coeffs: (2n+1,) coefficient vector against the real basis.
        points: (N, 3) unit vectors.
        order: 0 value only, 1 adds gradient, 2 adds Hessian.

    Returns:
        dict with 'u' (N,), and for order >= 1 'grad' (N, 2), 'frame'
        (N, 2, 3) with the orthonormal tangent vectors the components refer
        to, and for order = 2 'hess' (N, 2, 2) the Levi-Civita Hessian.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    npts = points.shape[0]
    all_coeffs = rotated_coefficients(n, np.asarray(coeffs, dtype=float))
    sys_idx = np.argmin(np.abs(points @ np.stack(
        [np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])]
    ).T), axis=1)

    u = np.empty(npts)
    grad = np.empty((npts, 2)) if order >= 1 else None
    frame = np.empty((npts, 2, 3)) if order >= 1 else None
    hess = np.empty((npts, 2, 2)) if order >= 2 else None

    for s, A in enumerate(_SYSTEMS):
        sel = np.where(sys_idx == s)[0]
        if sel.size == 0:
            continue
        a = all_coeffs[s]
        q = points[sel] @ A.T
        ct = np.clip(q[:, 2], -1.0, 1.0)
        theta = np.arccos(ct)
        phi = np.arctan2(q[:, 1], q[:, 0])
        st = np.sin(theta)
        P, dP, ddP = theta_functions(n, theta)
        cosm = np.empty((n + 1, sel.size))
        sinm = np.empty((n + 1, sel.size))
        for m in range(n + 1):
            cosm[m] = np.cos(m * phi)
            sinm[m] = np.sin(m * phi)
        # accumulate value and the 5 partials
        val = a[0] * P[0]
        u_t = a[0] * dP[0]
        u_tt = a[0] * ddP[0]
        u_p = np.zeros(sel.size)
        u_pp = np.zeros(sel.size)
        u_tp = np.zeros(sel.size)
        for m in range(1, n + 1):
            f = sqrt(2.0) * (-1.0) ** m
            ang = a[2 * m - 1] * cosm[m] + a[2 * m] * sinm[m]
            dang = m * (-a[2 * m - 1] * sinm[m] + a[2 * m] * cosm[m])
            val += f * P[m] * ang
            u_t += f * dP[m] * ang
            u_tt += f * ddP[m] * ang
            u_p += f * P[m] * dang
            u_tp += f * dP[m] * dang
            u_pp += -m * m * f * P[m] * ang
        u[sel] = val
        if order >= 1:
            g1 = u_t
            g2 = u_p / st
            grad[sel, 0] = g1
            grad[sel, 1] = g2
            cp, sp = np.cos(phi), np.sin(phi)
            e_t = np.stack([ct * cp, ct * sp, -st], axis=1)
            e_p = np.stack([-sp, cp, np.zeros_like(sp)], axis=1)
            frame[sel, 0] = e_t @ A
            frame[sel, 1] = e_p @ A
        if order >= 2:
            hess[sel, 0, 0] = u_tt
            h12 = u_tp / st - ct / (st * st) * u_p
            hess[sel, 0, 1] = h12
            hess[sel, 1, 0] = h12
            hess[sel, 1, 1] = u_pp / (st * st) + ct / st * u_t
    out = {"u": u}
    if order >= 1:
        out["grad"] = grad
        out["frame"] = frame
    if order >= 2:
        out["hess"] = hess
    return out
