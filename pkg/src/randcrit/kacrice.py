"""Pointwise Kac-Rice integrand for constant-coefficient covariance data.

Given the covariance of the gradient (m x m), the covariance of the Hessian
in the orthonormal Ehat basis (N_m x N_m, N_m = m(m+1)/2), and their cross
covariance (N_m x m), the expected-critical-point density at the point is

    (2 pi)^{-m/2} det(S_grad)^{-1/2} E|det Y|,

where Y is the Gaussian symmetric matrix whose covariance is the Schur
complement Xi = S_hess - Omega S_grad^{-1} Omega^T.

Basis bookkeeping is centralized here: Hessian coordinates are always in
the orthonormal basis Ehat_ij (diagonal entries first, then off-diagonal
pairs in lexicographic order, off-diagonal coordinates carrying the sqrt 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .exceptions import DegeneracyError, ShapeError
from .gaussian import GaussianVector, JointGaussian, condition
from .ensembles import sym_index_pairs
from .matgauss import MCEstimate


def hat_basis_to_matrices(y: np.ndarray) -> np.ndarray:
    """Map coordinate vectors in the Ehat basis, shape (..., N_m), to dense
    symmetric matrices, shape (..., m, m): x_ii = y_ii, x_ij = y_ij/sqrt 2."""
    y = np.asarray(y, dtype=float)
    n_m = y.shape[-1]
    m = int((sqrt(8 * n_m + 1) - 1) / 2)
    if m * (m + 1) // 2 != n_m:
        raise ShapeError(f"last axis {n_m} is not a triangular number")
    X = np.zeros(y.shape[:-1] + (m, m))
    for k, (i, j) in enumerate(sym_index_pairs(m)):
        if i == j:
            X[..., i, i] = y[..., k]
        else:
            v = y[..., k] / sqrt(2.0)
            X[..., i, j] = v
            X[..., j, i] = v
    return X


def matrices_to_hat_basis(X: np.ndarray) -> np.ndarray:
    """Inverse of hat_basis_to_matrices."""
    X = np.asarray(X, dtype=float)
    m = X.shape[-1]
    cols = []
    for i, j in sym_index_pairs(m):
        cols.append(X[..., i, j] if i == j else sqrt(2.0) * X[..., i, j])
    return np.stack(cols, axis=-1)


@dataclass
class CovarianceBlocks:
    """Covariance data of (Hessian, gradient) at a point."""

    S_grad: np.ndarray   # (m, m)
    S_hess: np.ndarray   # (N_m, N_m), Ehat basis
    Omega: np.ndarray    # (N_m, m) cross covariance

    def __post_init__(self):
        self.S_grad = np.asarray(self.S_grad, dtype=float)
        self.S_hess = np.asarray(self.S_hess, dtype=float)
        self.Omega = np.asarray(self.Omega, dtype=float)
        m = self.S_grad.shape[0]
        n_m = m * (m + 1) // 2
        if self.S_grad.shape != (m, m):
            raise ShapeError("S_grad must be square")
        if self.S_hess.shape != (n_m, n_m):
            raise ShapeError(f"S_hess must be ({n_m}, {n_m}) for m={m}")
        if self.Omega.shape != (n_m, m):
            raise ShapeError(f"Omega must be ({n_m}, {m})")
        # joint PSD check happens in the JointGaussian constructor
        self.joint = JointGaussian(
            GaussianVector(np.zeros(n_m), self.S_hess),
            GaussianVector(np.zeros(m), self.S_grad),
            self.Omega,
        )

    @property
    def m(self) -> int:
        return self.S_grad.shape[0]


def conditioned_hessian(b: CovarianceBlocks) -> np.ndarray:
    """Schur complement Xi = S_hess - Omega S_grad^{-1} Omega^T (PSD).

    Raises DegeneracyError when S_grad is singular (1-ampleness failure).
    """
    return condition(b.joint).residual.covariance


def kacrice_integrand(
    b: CovarianceBlocks, mc_samples: int = 200_000, seed: int = 0
) -> MCEstimate:
    """(2 pi)^{-m/2} det(S_grad)^{-1/2} E|det Y|, Y ~ N(0, Xi) reassembled
    as a symmetric matrix; E|det| estimated by Monte Carlo."""
    m = b.m
    xi = conditioned_hessian(b)
    sign, logdet = np.linalg.slogdet(b.S_grad)
    if sign <= 0:
        raise DegeneracyError("S_grad must be positive definite")
    pref = (2 * pi) ** (-0.5 * m) * np.exp(-0.5 * logdet)
    w, V = np.linalg.eigh(xi)
    w = np.clip(w, 0.0, None)
    rng = np.random.default_rng(seed)
    vals = np.empty(mc_samples)
    chunk = 1 << 15
    for start in range(0, mc_samples, chunk):
        k = min(chunk, mc_samples - start)
        z = rng.standard_normal((k, xi.shape[0]))
        y = z * np.sqrt(w) @ V.T
        vals[start:start + k] = np.abs(np.linalg.det(hat_basis_to_matrices(y)))
    mean = float(vals.mean())
    se = float(vals.std() / sqrt(mc_samples))
    return MCEstimate(pref * mean, pref * se, mc_samples, seed)
