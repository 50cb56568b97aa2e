"""Hermite-function machinery and the GOE 1-point correlation function.

The eigenvalue ensemble is the one with joint density proportional to
e^{-|lambda|^2/2} |Delta_n(lambda)| (matrix weight e^{-tr X^2 / 2}, i.e.
Gamma_{1,0,1/2}).  Its mean eigenvalue density is

    R_n(x) = k_n(x) + ell_n(x),
    k_n(x)   = sum_{k<n} psi_k(x)^2        (Christoffel-Darboux part)
    ell_n(x) = sqrt(n/2) psi_{n-1}(x) F_n(x) + alpha_n(x),

with psi_k the orthonormal Hermite functions, F_n(x) the half-sign
transform int eps(x-t) psi_n(t) dt, alpha_n = 0 for even n and
psi_{n-1} / int psi_{n-1} for odd n.  The normalization int R_n = n and the
semicircle limit of sqrt(n) R_n(sqrt(n) s)/n are the oracles used in the
tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log, pi, sqrt

import numpy as np
from scipy.special import roots_hermite

from .exceptions import NumericError, ParameterError

SQRT_PI = sqrt(pi)


def psi_all(n: int, x) -> np.ndarray:
    """Orthonormal Hermite functions psi_0..psi_n at x, shape (n+1,) + x.shape.

    Normalized three-term recurrence:
        psi_{k+1} = x sqrt(2/(k+1)) psi_k - sqrt(k/(k+1)) psi_{k-1},
    which never forms 2^n n! and is stable to n of a few hundred.
    """
    if n < 0:
        raise ParameterError(f"degree must be >= 0, got {n}")
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = pi ** (-0.25) * np.exp(-0.5 * x * x)
    if n >= 1:
        out[1] = sqrt(2.0) * x * out[0]
    for k in range(1, n):
        out[k + 1] = x * sqrt(2.0 / (k + 1)) * out[k] - sqrt(k / (k + 1.0)) * out[k - 1]
    return out


def hermite_psi(n: int, x: float) -> float:
    """psi_n(x) = H_n(x) e^{-x^2/2} / (2^n n! sqrt(pi))^{1/2}."""
    return float(psi_all(n, np.asarray(x, dtype=float))[n])


def hermite_h_values(n: int, x: float) -> np.ndarray:
    """Raw H_0..H_n at x by the recurrence H_{k+1} = 2x H_k - 2k H_{k-1}.

    Overflows for large n and |x|; used only for the HermiteState
    recurrence diagnostics at moderate n.
    """
    H = np.empty(n + 1)
    H[0] = 1.0
    if n >= 1:
        H[1] = 2.0 * x
    for k in range(1, n):
        H[k + 1] = 2.0 * x * H[k] - 2.0 * k * H[k - 1]
    return H


@dataclass
class HermiteState:
    """Values H_0..H_n and psi_0..psi_n at a point."""

    n: int
    x: float
    h_values: np.ndarray
    psi_values: np.ndarray

    @classmethod
    def at(cls, n: int, x: float) -> "HermiteState":
        return cls(n, x, hermite_h_values(n, x), psi_all(n, np.asarray(x, dtype=float)))

    def recurrence_residual(self) -> float:
        """Max relative residual of H_{k+1} = 2x H_k - 2k H_{k-1}."""
        res = 0.0
        for k in range(1, self.n):
            lhs = self.h_values[k + 1]
            rhs = 2.0 * self.x * self.h_values[k] - 2.0 * k * self.h_values[k - 1]
            scale = max(abs(lhs), abs(rhs), 1.0)
            res = max(res, abs(lhs - rhs) / scale)
        return res


def cd_kernel(n: int, x) -> np.ndarray | float:
    """k_n(x) = sum_{k=0}^{n-1} psi_k(x)^2, by direct sum, cross-checked
    against the Christoffel-Darboux closed form
        n psi_n^2 - sqrt(n(n+1)) psi_{n-1} psi_{n+1}
    (the normalized version of the H_n^2 - H_{n-1} H_{n+1} identity)."""
    if n < 1:
        raise ParameterError(f"cd_kernel needs n >= 1, got {n}")
    xa = np.asarray(x, dtype=float)
    psis = psi_all(n + 1, xa)
    direct = np.sum(np.square(psis[:n]), axis=0)
    closed = n * psis[n] ** 2 - sqrt(n * (n + 1.0)) * psis[n - 1] * psis[n + 1]
    scale = np.maximum(np.abs(direct), 1e-300)
    if np.max(np.abs(direct - closed) / np.maximum(scale, 1e-12)) > 1e-6:
        raise NumericError(f"Christoffel-Darboux identity violated at n={n}")
    out = direct if np.ndim(x) else float(direct)
    return out


def log_int_psi_even(n: int) -> float:
    """log of int psi_n dx for even n: sqrt(2 pi n!) / (2^{n/2} (n/2)! pi^{1/4}).

    From the generating function, int e^{-x^2/2} H_n dx = sqrt(2 pi) n!/(n/2)!;
    dividing by the psi normalization sqrt(2^n n! sqrt(pi)) gives the value
    above.  Pinned by the exact n = 1 one-point function e^{-x^2/2}/sqrt(2 pi)
    and by int R_n = n.
    """
    if n % 2:
        raise ParameterError("int psi_n vanishes for odd n")
    k = n // 2
    return 0.5 * (log(2.0 * pi) + lgamma(n + 1)) - k * log(2.0) - lgamma(k + 1) - 0.25 * log(pi)


def int_psi(n: int) -> float:
    """int_R psi_n(x) dx: 0 for odd n, closed form for even n."""
    if n % 2:
        return 0.0
    return float(np.exp(log_int_psi_even(n)))


def psi_support_radius(n: int) -> float:
    """Integration cutoff: psi_n is numerically zero beyond sqrt(2n) + 6."""
    return sqrt(2.0 * max(n, 1)) + 6.0


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


class _PanelGrid:
    """Composite 16-node Gauss-Legendre grid on [-R, R] with panels no wider
    than half the oscillation wavelength pi/sqrt(2n) of psi_n."""

    def __init__(self, n: int):
        R = psi_support_radius(n)
        width = min(0.5 * pi / sqrt(2.0 * max(n, 1)), 0.5)
        k = int(np.ceil(2.0 * R / width))
        self.edges = np.linspace(-R, R, k + 1)
        half = 0.5 * (self.edges[1] - self.edges[0])
        mids = 0.5 * (self.edges[:-1] + self.edges[1:])
        self.nodes = (mids[:, None] + half * _GL_NODES[None, :]).ravel()
        self.weights = np.tile(half * _GL_WEIGHTS, k)
        self.n_panels = k

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def cumulative_at_edges(self, values: np.ndarray) -> np.ndarray:
        per_panel = (values.reshape(self.n_panels, 16) *
                     self.weights.reshape(self.n_panels, 16)).sum(axis=1)
        out = np.empty(self.n_panels + 1)
        out[0] = 0.0
        np.cumsum(per_panel, out=out[1:])
        return out


_panel_cache: dict[int, "_PanelGrid"] = {}


def _panels(n: int) -> _PanelGrid:
    grid = _panel_cache.get(n)
    if grid is None:
        grid = _panel_cache[n] = _PanelGrid(n)
    return grid


def eps_transform_batch(n: int, xs) -> np.ndarray:
    """F_n(x) = int eps(x - t) psi_n(t) dt at many points, eps = +-1/2 (0 at 0).

    Evaluated as int_{-R}^{x} psi_n - (1/2) int psi_n on a composite
    Gauss-Legendre grid (panels resolve the psi_n oscillation), with the
    partial panel [edge, x] integrated by a dedicated 16-node rule.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    grid = _panels(n)
    R = grid.edges[-1]
    psi_on_grid = psi_all(n, grid.nodes)[n]
    cum = grid.cumulative_at_edges(psi_on_grid)
    xc = np.clip(xs, -R, R)
    idx = np.clip(np.searchsorted(grid.edges, xc, side="right") - 1, 0, grid.n_panels - 1)
    left = grid.edges[idx]
    half = 0.5 * (xc - left)
    mid = left + half
    part_nodes = mid[None, :] + half[None, :] * _GL_NODES[:, None]
    part_vals = psi_all(n, part_nodes)[n]
    partial = (part_vals * _GL_WEIGHTS[:, None]).sum(axis=0) * half
    return cum[idx] + partial - 0.5 * int_psi(n)


def eps_transform(n: int, x: float) -> float:
    """Scalar F_n(x); see eps_transform_batch."""
    return float(eps_transform_batch(n, x)[0])


def alpha_correction(n: int, x) -> np.ndarray | float:
    """alpha_n: zero for even n, psi_{n-1}(x) / int psi_{n-1} for odd n."""
    xa = np.asarray(x, dtype=float)
    if n % 2 == 0:
        out = np.zeros_like(xa)
    else:
        out = psi_all(n - 1, xa)[n - 1] / int_psi(n - 1)
    return out if np.ndim(x) else float(out)


def ell_correction_batch(n: int, xs) -> np.ndarray:
    """ell_n(x) = sqrt(n/2) psi_{n-1}(x) F_n(x) + alpha_n(x) at many points."""
    if n < 1:
        raise ParameterError(f"ell_correction needs n >= 1, got {n}")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    psi_nm1 = psi_all(n - 1, xs)[n - 1]
    return sqrt(n / 2.0) * psi_nm1 * eps_transform_batch(n, xs) + alpha_correction(n, xs)


def ell_correction(n: int, x: float) -> float:
    """Scalar ell_n(x); see ell_correction_batch."""
    return float(ell_correction_batch(n, x)[0])


def correlation_r_batch(n: int, xs) -> np.ndarray:
    """1-point correlation R_n = k_n + ell_n at many points; int R_n = n."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    return cd_kernel(n, xs) + ell_correction_batch(n, xs)


def correlation_r(n: int, x: float) -> float:
    """1-point correlation R_n(x) = k_n(x) + ell_n(x); int R_n = n."""
    return float(correlation_r_batch(n, x)[0])


@dataclass
class CorrelationEval:
    """All pieces of the 1-point function at one point."""

    n: int
    x: float
    k_n: float
    ell_n: float
    R_n: float
    rho_n: float

    @classmethod
    def at(cls, n: int, x: float) -> "CorrelationEval":
        k = float(cd_kernel(n, x))
        ell = ell_correction(n, x)
        R = k + ell
        return cls(n, x, k, ell, R, R / n)


def rescaled_density(n: int, s: float) -> float:
    """rho_bar_n(s) = R_n(sqrt(n) s) / sqrt(n); converges to the semicircle."""
    if n < 1:
        raise ParameterError(f"rescaled_density needs n >= 1, got {n}")
    r = sqrt(float(n))
    return correlation_r(n, r * s) / r


def rescaled_density_batch(n: int, s) -> np.ndarray:
    if n < 1:
        raise ParameterError(f"rescaled_density needs n >= 1, got {n}")
    r = sqrt(float(n))
    return correlation_r_batch(n, r * np.atleast_1d(np.asarray(s, dtype=float))) / r


def semicircle(x: float) -> float:
    """Semicircle density sqrt(2 - x^2)/pi on |x| <= sqrt(2), else 0."""
    t = 2.0 - x * x
    return sqrt(t) / pi if t > 0.0 else 0.0


def integral_r(n: int, n_nodes: int | None = None) -> float:
    """int R_n(x) dx, for the normalization check int R_n = n.

    The Christoffel-Darboux part integrates exactly with Gauss-Hermite
    (polynomial times e^{-x^2}); the ell part is integrated by an adaptive
    rule on the support interval.
    """
    nodes, weights = roots_hermite(n + 1 if n_nodes is None else n_nodes)
    # k_n = (poly of degree 2n-2) * e^{-x^2}: GH with n+1 nodes is exact
    psis = psi_all(n - 1, nodes) if n > 1 else psi_all(0, nodes)
    kvals = np.sum(np.square(psis[:n]), axis=0)
    k_int = float(np.sum(weights * kvals * np.exp(nodes ** 2)))
    grid = _panels(n)
    ell_int = grid.integrate(ell_correction_batch(n, grid.nodes))
    return k_int + ell_int


def wigner_limit_integral(n: int, n_nodes: int | None = None) -> float:
    """int rho_bar_n(s) w_n(s) ds with w_n(s) = sqrt(3n/(2 pi)) e^{-3 n s^2/2}.

    Substituting s = r sqrt(2/(3n)) turns the weight into e^{-r^2}/sqrt(pi),
    evaluated with Gauss-Hermite nodes.  Converges to semicircle(0) =
    sqrt(2)/pi as n grows.
    """
    if n < 2:
        raise ParameterError(f"wigner_limit_integral needs n >= 2, got {n}")
    if n_nodes is None:
        n_nodes = max(96, 4 * n)
    nodes, weights = roots_hermite(n_nodes)
    scale = sqrt(2.0 / (3.0 * n))
    vals = rescaled_density_batch(n, scale * nodes)
    return float(np.sum(weights * vals) / SQRT_PI)


def selberg_constant_z(n: int) -> float:
    """log Z_n for Z_n = int e^{-|lambda|^2/2} |Delta_n| dlambda
    = 2^{n/2} n! prod_{j=1}^n Gamma(j/2)."""
    if n < 1:
        raise ParameterError(f"selberg constant needs n >= 1, got {n}")
    return 0.5 * n * log(2.0) + lgamma(n + 1) + sum(lgamma(j / 2.0) for j in range(1, n + 1))
