"""The 3-parameter family Gamma_{a,b,c} of centered Gaussian measures on
m x m real symmetric matrices.

Entry moments: E(x_ii^2) = a, E(x_ii x_jj) = b for i != j, E(x_ij^2) = c for
i < j, all other cross-moments zero.  Positivity requires a - b > 0, c > 0,
a + (m-1) b > 0.  In the trace inner product (A, B) = tr(AB) the covariance
operator splits as Qhat_{a,b,c} = G_m(a,b) (+) 2c on diagonal / off-diagonal
parts, where G_m(a,b) = (a-b) I + b 11^T.

GOE is Gamma_{2,0,1}; the O(m)-invariant subfamily is a - b = 2c, of which
Gamma_{3c,c,c} is the one arising as a Hessian limit law.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, pi, sqrt

import numpy as np

from .exceptions import ParameterError, ShapeError

EIG_TOL = 1e-10


def sym_index_pairs(m: int) -> list[tuple[int, int]]:
    """Index pairs (i <= j) in the order used everywhere: diagonal first,
    then off-diagonal in lexicographic order."""
    pairs = [(i, i) for i in range(m)]
    pairs += [(i, j) for i in range(m) for j in range(i + 1, m)]
    return pairs


@dataclass(frozen=True)
class EnsembleParams:
    """Parameter triple (a, b, c) of Gamma_{a,b,c} on m x m symmetric matrices."""

    m: int
    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.m < 2:
            raise ParameterError(f"matrix size must be >= 2, got m={self.m}")
        if not (self.a - self.b > 0 and self.c > 0 and self.a + (self.m - 1) * self.b > 0):
            raise ParameterError(
                f"positivity violated for (a,b,c)=({self.a},{self.b},{self.c}), m={self.m}: "
                "need a-b>0, c>0, a+(m-1)b>0"
            )

    def scaled(self, t: float) -> "EnsembleParams":
        """Gamma_{ta, tb, tc}; samples scale like sqrt(t)."""
        return EnsembleParams(self.m, t * self.a, t * self.b, t * self.c)

    @property
    def is_invariant(self) -> bool:
        """True when a - b = 2c, i.e. the measure is O(m)-invariant."""
        scale = max(abs(self.a), abs(self.b), abs(self.c))
        return abs(self.a - self.b - 2 * self.c) <= 1e-12 * scale


def goe_params(m: int, c: float = 1.0) -> EnsembleParams:
    """The Gaussian orthogonal ensemble Gamma_{2c,0,c}."""
    return EnsembleParams(m, 2 * c, 0.0, c)


def universal_params(m: int, c: float = 1.0) -> EnsembleParams:
    """The Hessian limit ensemble Gamma_{3c,c,c}."""
    return EnsembleParams(m, 3 * c, c, c)


class SymMatrix:
    """Dense-backed symmetric matrix with packed (i <= j) entry access."""

    def __init__(self, dense: np.ndarray):
        dense = np.asarray(dense, dtype=float)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise ShapeError(f"expected a square matrix, got shape {dense.shape}")
        scale = np.max(np.abs(dense)) or 1.0
        if np.max(np.abs(dense - dense.T)) > 1e-12 * scale:
            raise ParameterError("matrix is not symmetric")
        self._dense = 0.5 * (dense + dense.T)

    @classmethod
    def from_packed(cls, m: int, packed: np.ndarray) -> "SymMatrix":
        packed = np.asarray(packed, dtype=float)
        if packed.shape != (m * (m + 1) // 2,):
            raise ShapeError(f"packed entries must have length m(m+1)/2 = {m*(m+1)//2}")
        X = np.zeros((m, m))
        for v, (i, j) in zip(packed, sym_index_pairs(m)):
            X[i, j] = X[j, i] = v
        return cls(X)

    @property
    def m(self) -> int:
        return self._dense.shape[0]

    def entry(self, i: int, j: int) -> float:
        return float(self._dense[i, j])

    def packed(self) -> np.ndarray:
        return np.array([self._dense[i, j] for i, j in sym_index_pairs(self.m)])

    def dense(self) -> np.ndarray:
        return self._dense.copy()

    def trace(self) -> float:
        return float(np.trace(self._dense))

    def inner(self, other: "SymMatrix") -> float:
        """Frobenius inner product (A, B) = tr(AB)."""
        return float(np.sum(self._dense * other._dense))

    def det(self) -> float:
        return float(np.linalg.det(self._dense))


@dataclass
class CovarianceOperator:
    """Qhat_{a,b,c} = G_m(a,b) (+) 2c I in the orthonormal Ehat basis."""

    diag_block: np.ndarray
    offdiag_scale: float

    @classmethod
    def from_params(cls, p: EnsembleParams) -> "CovarianceOperator":
        G = np.full((p.m, p.m), p.b)
        np.fill_diagonal(G, p.a)
        return cls(G, 2.0 * p.c)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.diag_block)

    def dense(self) -> np.ndarray:
        m = self.diag_block.shape[0]
        n_off = m * (m - 1) // 2
        Q = np.zeros((m + n_off, m + n_off))
        Q[:m, :m] = self.diag_block
        Q[m:, m:] = self.offdiag_scale * np.eye(n_off)
        return Q


def covariance_det(p: EnsembleParams) -> float:
    """det Qhat_{a,b,c} = (a-b)^{m-1} (a+(m-1)b) (2c)^{m(m-1)/2}.

    Follows the spectrum of G_m(a,b): eigenvalue a-b with multiplicity m-1
    and the simple eigenvalue a+(m-1)b.
    """
    m = p.m
    return (p.a - p.b) ** (m - 1) * (p.a + (m - 1) * p.b) * (2.0 * p.c) ** (m * (m - 1) // 2)


def log_covariance_det(p: EnsembleParams) -> float:
    m = p.m
    return (
        (m - 1) * log(p.a - p.b)
        + log(p.a + (m - 1) * p.b)
        + (m * (m - 1) // 2) * log(2.0 * p.c)
    )


def covariance_inverse(p: EnsembleParams) -> tuple[float, float, float]:
    """Parameters (a', b', 2c') of Qhat^{-1} = G_m(a',b') (+) 2c' I.

    a' - b' = 1/(a-b),  a' + (m-1) b' = 1/(a+(m-1)b),  2c' = 1/(2c).
    """
    m = p.m
    u = 1.0 / (p.a - p.b)
    v = 1.0 / (p.a + (m - 1) * p.b)
    a_p = (v + (m - 1) * u) / m
    b_p = (v - u) / m
    return a_p, b_p, 1.0 / (2.0 * p.c)


def log_density(p: EnsembleParams, X: SymMatrix | np.ndarray) -> float:
    """Log density of Gamma_{a,b,c} at X against the metric volume |dX|."""
    Xd = X.dense() if isinstance(X, SymMatrix) else np.asarray(X, dtype=float)
    m = p.m
    if Xd.shape != (m, m):
        raise ShapeError(f"matrix size {Xd.shape} does not match m={m}")
    a_p, b_p, two_c_p = covariance_inverse(p)
    tr = float(np.trace(Xd))
    tr2 = float(np.sum(Xd * Xd))
    diag2 = float(np.sum(np.diag(Xd) ** 2))
    quad = (a_p - b_p - 1.0 / (2.0 * p.c)) * diag2 + b_p * tr * tr + tr2 / (2.0 * p.c)
    n_m = m * (m + 1) / 2.0
    return -0.5 * quad - 0.5 * n_m * log(2 * pi) - 0.5 * log_covariance_det(p)


def density(p: EnsembleParams, X: SymMatrix | np.ndarray) -> float:
    """Density of Gamma_{a,b,c} at X against |dX| = 2^{binom(m,2)/2} prod dx_ij."""
    return float(np.exp(log_density(p, X)))


def sample_dense(p: EnsembleParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n matrices from Gamma_{a,b,c}, shape (n, m, m).

    Diagonal vector from N(0, G_m(a,b)) using the exact two-eigenvalue
    decomposition G_m = (a-b)(I - P) + (a+(m-1)b) P, P the projection onto
    the all-ones direction; off-diagonals independent N(0, c).
    """
    m = p.m
    z = rng.standard_normal((n, m))
    zbar = z.mean(axis=1, keepdims=True)
    d = sqrt(p.a - p.b) * (z - zbar) + sqrt(p.a + (m - 1) * p.b) * zbar
    X = np.zeros((n, m, m))
    idx = np.arange(m)
    X[:, idx, idx] = d
    iu, ju = np.triu_indices(m, k=1)
    off = sqrt(p.c) * rng.standard_normal((n, iu.size))
    X[:, iu, ju] = off
    X[:, ju, iu] = off
    return X


def sample(p: EnsembleParams, rng: np.random.Generator) -> SymMatrix:
    """Draw one matrix from Gamma_{a,b,c}."""
    return SymMatrix(sample_dense(p, 1, rng)[0])


def sample_goe_plus_scalar(p: EnsembleParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """Alternative construction for Gamma_{3c,c,c}: B + Y I with B GOE
    (E b_ii^2 = 2c, E b_ij^2 = c) and Y an independent N(0, c) scalar."""
    if not (abs(p.a - 3 * p.c) <= 1e-12 * p.c and abs(p.b - p.c) <= 1e-12 * p.c):
        raise ParameterError("GOE+scalar construction requires (a,b,c) = (3c,c,c)")
    m = p.m
    H = rng.standard_normal((n, m, m))
    B = sqrt(p.c / 2.0) * (H + np.transpose(H, (0, 2, 1)))
    Y = sqrt(p.c) * rng.standard_normal(n)
    return B + Y[:, None, None] * np.eye(m)


def invariant_norm(p: EnsembleParams, A: SymMatrix | np.ndarray) -> float:
    """|A|^2_{a,b,c} = b (tr A)^2 + 2c tr(A^2), valid when a - b = 2c."""
    if not p.is_invariant:
        raise ParameterError(
            f"invariant norm requires a - b = 2c, got a-b={p.a - p.b}, 2c={2 * p.c}"
        )
    Ad = A.dense() if isinstance(A, SymMatrix) else np.asarray(A, dtype=float)
    tr = float(np.trace(Ad))
    tr2 = float(np.sum(Ad * Ad))
    return p.b * tr * tr + 2.0 * p.c * tr2


def fourth_moment_oracle(c: float, ij: tuple[int, int], kl: tuple[int, int], m: int) -> float:
    """Quartic Gaussian moment c * E[(E_ij x, x)(E_kl x, x)] for x standard
    normal on R^m: 3c for (ii,ii), c for (ii,jj) i != j, 4c for (ij,ij)
    i < j, and 0 for every other index combination."""
    i, j = ij
    k, l = kl
    if not (0 <= i <= j < m and 0 <= k <= l < m):
        raise ParameterError(f"index pairs {ij}, {kl} out of range for m={m}")
    if (i, j) != (k, l):
        if i == j and k == l:
            return c
        return 0.0
    if i == j:
        return 3.0 * c
    return 4.0 * c
