"""Finite-dimensional Gaussian vector utilities.

Covariance forms, pushforward under linear maps, two-block conditioning
(the regression formula), and the homogeneous-function integral identities
that convert sphere / ball / Gaussian-weight integrals into one another.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma, pi

import numpy as np

from .exceptions import DegeneracyError, ParameterError, ShapeError

# Relative eigenvalue floor below which a covariance counts as violating PSD.
PSD_TOL = 1e-10
# Relative symmetry tolerance for covariance matrices.
SYM_TOL = 1e-12
# Conditioning thresholds: below SING_TOL the block is singular, between
# SING_TOL and NEAR_SING_TOL we fall back to a pseudoinverse and flag it.
SING_TOL = 1e-12
NEAR_SING_TOL = 1e-8


def _check_covariance(cov: np.ndarray, what: str) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ShapeError(f"{what}: covariance must be square, got {cov.shape}")
    scale = np.max(np.abs(cov)) or 1.0
    if np.max(np.abs(cov - cov.T)) > SYM_TOL * scale:
        raise ParameterError(f"{what}: covariance is not symmetric")
    w = np.linalg.eigvalsh(0.5 * (cov + cov.T))
    top = max(w[-1], 0.0)
    if w[0] < -PSD_TOL * max(top, 1.0):
        raise ParameterError(
            f"{what}: covariance has eigenvalue {w[0]:.3e} below the PSD floor"
        )
    return cov


@dataclass
class GaussianVector:
    """Gaussian measure on R^d given by mean vector and covariance matrix."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        self.mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        self.covariance = _check_covariance(self.covariance, "GaussianVector")
        if self.mean.shape != (self.covariance.shape[0],):
            raise ShapeError(
                f"mean has shape {self.mean.shape}, covariance {self.covariance.shape}"
            )

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n samples, shape (n, d)."""
        w, V = np.linalg.eigh(self.covariance)
        w = np.clip(w, 0.0, None)
        z = rng.standard_normal((n, self.dim))
        return self.mean + z * np.sqrt(w) @ V.T


@dataclass
class JointGaussian:
    """Two jointly Gaussian blocks X1 (dim d1), X2 (dim d2) with cross covariance."""

    block1: GaussianVector
    block2: GaussianVector
    cross: np.ndarray  # Cov(X1, X2), shape (d1, d2)

    def __post_init__(self):
        self.cross = np.asarray(self.cross, dtype=float)
        d1, d2 = self.block1.dim, self.block2.dim
        if self.cross.shape != (d1, d2):
            raise ShapeError(f"cross covariance must have shape ({d1}, {d2})")
        _check_covariance(self.assembled_covariance(), "JointGaussian")

    def assembled_covariance(self) -> np.ndarray:
        """Full (d1+d2) x (d1+d2) covariance of (X1, X2)."""
        return np.block(
            [
                [self.block1.covariance, self.cross],
                [self.cross.T, self.block2.covariance],
            ]
        )

    def assembled_mean(self) -> np.ndarray:
        return np.concatenate([self.block1.mean, self.block2.mean])


def pushforward(g: GaussianVector, L: np.ndarray) -> GaussianVector:
    """Image of a Gaussian under the linear map L: mean Lm, covariance L S L^T."""
    L = np.atleast_2d(np.asarray(L, dtype=float))
    if L.shape[1] != g.dim:
        raise ShapeError(f"linear map has {L.shape[1]} columns, vector dim {g.dim}")
    return GaussianVector(L @ g.mean, L @ g.covariance @ L.T)


@dataclass
class ConditionResult:
    """Output of two-block conditioning.

    C is the regression map: E(X1 | X2 = x2) = C x2 + residual.mean, and the
    conditional covariance is residual.covariance (independent of x2).
    flagged is True when block2 was near-singular and a pseudoinverse was used.
    """

    C: np.ndarray
    residual: GaussianVector
    flagged: bool = field(default=False)

    def __iter__(self):
        return iter((self.C, self.residual))


def condition(j: JointGaussian) -> ConditionResult:
    """Regression formula for jointly Gaussian blocks.

    C = Cov(X1,X2) S_{X2}^{-1};  residual covariance S_{X1} - C Cov(X2,X1).

    Raises:
        DegeneracyError: block2 covariance is singular below the 1e-12
            relative eigenvalue threshold.
    """
    S2 = j.block2.covariance
    w = np.linalg.eigvalsh(S2)
    top = max(w[-1], 0.0)
    if top <= 0.0 or w[0] <= SING_TOL * top:
        raise DegeneracyError(
            f"block2 covariance is singular (min/max eigenvalue {w[0]:.3e}/{top:.3e})"
        )
    flagged = w[0] <= NEAR_SING_TOL * top
    if flagged:
        S2_inv = np.linalg.pinv(S2, rcond=SING_TOL)
        C = j.cross @ S2_inv
    else:
        C = np.linalg.solve(S2, j.cross.T).T
    res_mean = j.block1.mean - C @ j.block2.mean
    res_cov = j.block1.covariance - C @ j.cross.T
    res_cov = 0.5 * (res_cov + res_cov.T)
    # clip the tiny negative eigenvalues produced by the subtraction
    wr, V = np.linalg.eigh(res_cov)
    scale = max(abs(wr[-1]), 1.0)
    if wr[0] < -PSD_TOL * scale:
        raise DegeneracyError(
            f"residual covariance not PSD (min eigenvalue {wr[0]:.3e})"
        )
    res_cov = (V * np.clip(wr, 0.0, None)) @ V.T
    return ConditionResult(C, GaussianVector(res_mean, res_cov), flagged)


def homogeneous_integral_transfer(
    k: float, N: int, sphere_integral: float
) -> tuple[float, float]:
    """Transfer a degree-k homogeneous integral from sphere to ball to Gaussian.

    Given I_S = integral of f over the unit sphere S^{N-1}, returns
    (I_B, I_G) where I_B is the integral over the unit ball and I_G the
    integral against the weight e^{-|u|^2} / pi^{N/2}:

        I_B = I_S / (k + N),      I_G = Gamma(1 + (k+N)/2) * I_B / pi^{N/2}.
    """
    if k < 0:
        raise ParameterError(f"homogeneity degree must be >= 0, got {k}")
    if N < 1:
        raise ParameterError(f"dimension must be >= 1, got {N}")
    ball = sphere_integral / (k + N)
    gauss = gamma(1.0 + (k + N) / 2.0) * ball / pi ** (N / 2.0)
    return ball, gauss


def gaussian_rescale_check(k: float, t: float, value_at_A: float) -> float:
    """Predicted integral of a degree-k homogeneous f under the rescaled
    Gaussian gamma_{tA}: t^{k/2} times the value under gamma_A."""
    if t <= 0:
        raise ParameterError(f"scale t must be positive, got {t}")
    return t ** (k / 2.0) * value_at_A
