"""The universal constants pipeline.

Spectral constants K_m and c_m from Gaussian ball moments, unit-ball and
sphere volumes, the integral I_m = E|det X| over Gamma_{3,1,1} by the
GOE/Hermite route, the dimensional constant C(m), and the large-m
log-asymptotic diagnostic.

The Hermite route used here is

    I_m = 2^{(m+3)/2} Gamma((m+3)/2) / sqrt(pi)
          * int rho_{m+1}(x) e^{-x^2/2} dx,

with rho_{m+1} = R_{m+1}/(m+1) the GOE one-point density of the
e^{-|lambda|^2/2} |Delta| ensemble.  It is obtained by rescaling
Gamma_{3,1,1} by sqrt(2), completing the square in tr(X - t I)^2 against a
Gaussian in t, and applying the Weyl integration formula; it agrees with
direct Monte Carlo over Gamma_{3,1,1} (and with the exact 4/sqrt(3) at
m = 2), which is the acceptance test for this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, lgamma, log, pi, sqrt

import numpy as np
from scipy.special import roots_hermite

from .exceptions import NumericError, ParameterError, UnsupportedError
from .hermite import correlation_r_batch
from .matgauss import MCEstimate

LOG_2PI = log(2.0 * pi)


def k_m(m: int) -> float:
    """K_m = 1 / (2 (4 pi)^{m/2} Gamma(2 + m/2)), the gradient-covariance constant."""
    return exp(log_k_m(m))


def log_k_m(m: int) -> float:
    return -log(2.0) - 0.5 * m * log(4.0 * pi) - lgamma(2.0 + 0.5 * m)


def c_m(m: int) -> float:
    """c_m = 1 / (4 (4 pi)^{m/2} Gamma(3 + m/2)), the Hessian-covariance constant."""
    return exp(log_c_m(m))


def log_c_m(m: int) -> float:
    return -log(4.0) - 0.5 * m * log(4.0 * pi) - lgamma(3.0 + 0.5 * m)


def spectral_constant(alpha: tuple[int, ...], beta: tuple[int, ...], m: int) -> float:
    """C_m(alpha, beta): signed unit-ball moment of x^{alpha+beta} over (2 pi)^m.

    Zero unless alpha - beta is componentwise even; otherwise

        (-1)^{(|a|-|b|)/2} / ((4 pi)^{m/2} Gamma(1 + (|a|+|b|+m)/2))
        * prod_k Gamma(p_k + 1/2)/Gamma(1/2),   p = (alpha+beta)/2,

    via the ball-to-Gaussian moment identity.  Only totals |a|+|b| <= 4 are
    supported (the cases the covariance assembly uses).
    """
    alpha = tuple(int(v) for v in alpha)
    beta = tuple(int(v) for v in beta)
    if len(alpha) != m or len(beta) != m:
        raise ParameterError(f"multi-indices must have length m={m}")
    if any(v < 0 for v in alpha + beta):
        raise ParameterError("multi-index entries must be nonnegative")
    total = sum(alpha) + sum(beta)
    if total > 4:
        raise UnsupportedError(f"|alpha|+|beta| = {total} > 4 is not supported")
    if any((a - b) % 2 for a, b in zip(alpha, beta)):
        return 0.0
    gam = alpha + np.array(beta)
    if np.any(gam % 2):
        return 0.0
    p = gam // 2
    sign = (-1.0) ** ((sum(alpha) - sum(beta)) // 2)
    log_moment = float(np.sum([lgamma(pk + 0.5) - lgamma(0.5) for pk in p]))
    return sign * exp(log_moment - 0.5 * m * log(4.0 * pi) - lgamma(1.0 + 0.5 * (total + m)))


def ball_sphere_volumes(n: int) -> tuple[float, float]:
    """(omega_n, sigma_{n-1}): unit-ball volume pi^{n/2}/Gamma(1+n/2) and
    unit-sphere area n omega_n."""
    if n < 1:
        raise ParameterError(f"dimension must be >= 1, got {n}")
    omega = exp(0.5 * n * log(pi) - lgamma(1.0 + 0.5 * n))
    return omega, n * omega


def log_i_m_prefactor(m: int) -> float:
    """log of 2^{(m+3)/2} Gamma((m+3)/2) / sqrt(pi)."""
    return 0.5 * (m + 3) * log(2.0) + lgamma(0.5 * (m + 3)) - 0.5 * log(pi)


def gaussian_weighted_rho(n: int, n_nodes: int) -> float:
    """int rho_n(x) e^{-x^2/2} dx by Gauss-Hermite quadrature (x = sqrt2 u)."""
    nodes, weights = roots_hermite(n_nodes)
    vals = correlation_r_batch(n, sqrt(2.0) * nodes) / n
    return float(sqrt(2.0) * np.sum(weights * vals))


def i_m_fyodorov(m: int, n_nodes: int | None = None, check_tol: float = 1e-6) -> float:
    """I_m = E|det X| over Gamma_{3,1,1} through the GOE 1-point function.

    Quadrature node count defaults to 8 (m+1) and the result is validated by
    doubling the nodes; disagreement beyond check_tol relative raises
    NumericError.
    """
    if m < 2:
        raise ParameterError(f"i_m_fyodorov needs m >= 2, got {m}")
    return exp(log_i_m_fyodorov(m, n_nodes, check_tol))


def log_i_m_fyodorov(m: int, n_nodes: int | None = None, check_tol: float = 1e-6) -> float:
    if m < 2:
        raise ParameterError(f"i_m_fyodorov needs m >= 2, got {m}")
    if n_nodes is None:
        n_nodes = 8 * (m + 1)
    v1 = gaussian_weighted_rho(m + 1, n_nodes)
    v2 = gaussian_weighted_rho(m + 1, 2 * n_nodes)
    if abs(v1 - v2) > check_tol * abs(v2):
        raise NumericError(
            f"I_{m} quadrature not converged: {v1:.3e} vs {v2:.3e} at doubled nodes"
        )
    return log_i_m_prefactor(m) + log(v2)


def log_c_of_m(m: int, log_i: float | None = None) -> float:
    """log C(m) = (m/2) log(4 pi/(m+4)) + log Gamma(1 + m/2) + log I_m."""
    if m < 2:
        raise ParameterError(f"C(m) needs m >= 2, got {m}")
    if log_i is None:
        log_i = log_i_m_fyodorov(m)
    return 0.5 * m * log(4.0 * pi / (m + 4.0)) + lgamma(1.0 + 0.5 * m) + log_i


def c_of_m(m: int) -> tuple[float, float]:
    """C(m) as a (log value, value) pair; the value overflows past m ~ 300."""
    lv = log_c_of_m(m)
    try:
        v = exp(lv)
    except OverflowError:
        v = float("inf")
    return lv, v


def density_limit_coefficient(m: int) -> float:
    """C(m) omega_m / (2 pi)^m, the uniform limit of L^{-m/2} rho_L.

    Equals (c_m/K_m)^{m/2} I_m = I_m / (m+4)^{m/2} after the
    (2 pi)^m / omega_m = (4 pi)^{m/2} Gamma(1 + m/2) identity.
    """
    omega, _ = ball_sphere_volumes(m)
    return exp(log_c_of_m(m) + log(omega) - m * LOG_2PI)


@dataclass(frozen=True)
class ConstantsRow:
    """One row of the constants table."""

    m: int
    k_m: float
    c_m: float
    i_m_mc: MCEstimate | None
    i_m_fyodorov: float
    log_i_m: float
    c_m_value: float
    log_c_m_value: float
    log_ratio_c: float  # log C(m) / ((m/2) log m)
    log_ratio_i: float  # log I_m / ((m/2) log m)

    @property
    def ratio_gap(self) -> float:
        """|log C(m) - log I_m| / ((m/2) log m)."""
        return abs(self.log_c_m_value - self.log_i_m) / (0.5 * self.m * log(self.m))


def constants_row(m: int, i_m_mc: MCEstimate | None = None) -> ConstantsRow:
    log_i = log_i_m_fyodorov(m)
    log_c = log_c_of_m(m, log_i)
    denom = 0.5 * m * log(m)
    return ConstantsRow(
        m=m,
        k_m=k_m(m),
        c_m=c_m(m),
        i_m_mc=i_m_mc,
        i_m_fyodorov=exp(log_i),
        log_i_m=log_i,
        c_m_value=exp(log_c) if log_c < 700 else float("inf"),
        log_c_m_value=log_c,
        log_ratio_c=log_c / denom,
        log_ratio_i=log_i / denom,
    )


def asymptotic_diagnostic(m_values: list[int]) -> list[ConstantsRow]:
    """Rows of log C(m)/((m/2) log m) and log I_m/((m/2) log m); both tend
    to 1 and their gap shrinks (the property-level form of the log-asymptotics)."""
    if any(m < 2 for m in m_values):
        raise ParameterError("all m must be >= 2")
    return [constants_row(m) for m in m_values]
