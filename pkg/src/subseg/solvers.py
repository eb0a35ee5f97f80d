"""Inexact augmented Lagrange multiplier solvers.

Three convex programs are solved here, all with the same penalty schedule
``mu_k = min(mu0 * rho**k, mu_max)`` and the same stopping rule (primal
feasibility in max-norm below ``eps``):

* column sparse robust PCA, ``min ||D||_* + lam ||E||_{2,1}  s.t. X = D + E``
* noisy low rank representation, ``min ||Z||_* + lam ||E||_{2,1}  s.t. X = XZ + E``
* noiseless low rank representation, ``min ||Z||_*  s.t. X = XZ``
"""

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import InvalidInputError
from .linalg import as_data_matrix, column_shrink, max_abs, svt_with_rank


@dataclass(frozen=True)
class AlmConfig:
    """Parameters of the inexact ALM iteration.

    ``mu0=None`` means ``1.25 / ||X||_2`` and ``mu_max=None`` means
    ``1e10 * mu0``, both resolved per problem by :meth:`resolve`.
    """

    lam: float = 1.0
    mu0: float | None = None
    rho: float = 1.5
    mu_max: float | None = None
    eps: float = 1e-7
    max_iter: int = 1000

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam <= 0:
            raise InvalidInputError(f"lam must be positive, got {self.lam}")
        if self.mu0 is not None and not self.mu0 > 0:
            raise InvalidInputError(f"mu0 must be positive, got {self.mu0}")
        if not self.rho > 1:
            raise InvalidInputError(f"rho must exceed 1, got {self.rho}")
        if self.mu_max is not None and self.mu0 is not None and not self.mu_max > self.mu0:
            raise InvalidInputError(f"mu_max ({self.mu_max}) must exceed mu0 ({self.mu0})")
        if self.mu_max is not None and not self.mu_max > 0:
            raise InvalidInputError(f"mu_max must be positive, got {self.mu_max}")
        if not self.eps > 0:
            raise InvalidInputError(f"eps must be positive, got {self.eps}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidInputError(f"max_iter must be a positive integer, got {self.max_iter}")

    def resolve(self, X):
        """Return ``(mu0, mu_max)`` for data matrix `X`."""
        mu0 = self.mu0
        if mu0 is None:
            mu0 = 1.25 / np.linalg.norm(X, 2)
        mu_max = self.mu_max if self.mu_max is not None else 1e10 * mu0
        if not mu_max > mu0:
            raise InvalidInputError(f"mu_max ({mu_max}) must exceed mu0 ({mu0})")
        return mu0, mu_max

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    residual: float
    mu: float
    rank: int
    nonzero_columns: int


@dataclass
class CsrpcaResult:
    D: np.ndarray
    E: np.ndarray
    Y: np.ndarray
    iterations: int
    converged: bool
    residual: float
    history: list = field(default_factory=list)


@dataclass
class LrrResult:
    Z: np.ndarray
    E: np.ndarray
    iterations: int
    converged: bool
    residual: float
    history: list = field(default_factory=list)


def _penalty(mu0, rho, mu_max, k):
    return min(mu0 * rho**k, mu_max)


def _count_nonzero_columns(E):
    return int(np.count_nonzero(np.any(E != 0, axis=0)))


def solve_csrpca(X, cfg):
    """Split `X` into a low-rank part and a column-sparse part.

    Parameters
    ----------
    X : array_like, shape (m, n)
    cfg : AlmConfig

    Returns
    -------
    CsrpcaResult
        ``converged`` is False when ``max_iter`` was reached first.
    """
    X = as_data_matrix(X, "X")
    zeros = np.zeros_like(X)
    if not np.any(X):
        return CsrpcaResult(zeros, zeros.copy(), zeros.copy(), 0, True, 0.0)

    lam = cfg.lam
    mu0, mu_max = cfg.resolve(X)
    # dual-feasible start: spectral norm <= 1, column norms <= lam
    scale = max(np.linalg.norm(X, 2), np.linalg.norm(X, axis=0).max() / lam)
    Y = X / scale
    D = zeros
    E = zeros.copy()
    residual = max_abs(X)
    history = []
    k = 0
    while residual >= cfg.eps and k < cfg.max_iter:
        mu = _penalty(mu0, cfg.rho, mu_max, k)
        D, rank = svt_with_rank(X - E + Y / mu, 1.0 / mu)
        E = column_shrink(X - D + Y / mu, lam / mu)
        R = X - D - E
        Y = Y + mu * R
        residual = max_abs(R)
        k += 1
        history.append(IterationRecord(k, residual, mu, rank, _count_nonzero_columns(E)))
    return CsrpcaResult(D, E, Y, k, residual < cfg.eps, residual, history)


class _LeastSquares:
    """Solves ``(I + X'X) Z = B`` with a cached Cholesky factor."""

    def __init__(self, X):
        n = X.shape[1]
        self.XtX = X.T @ X
        self._cho = scipy.linalg.cho_factor(np.eye(n) + self.XtX)

    def solve(self, B):
        return scipy.linalg.cho_solve(self._cho, B)


def solve_lrr_noisy(X, cfg):
    """Low rank representation of `X` with column-sparse noise.

    Uses the auxiliary splitting ``Z = J`` with multipliers ``Y1`` (for
    ``X = XZ + E``) and ``Y2`` (for ``Z = J``).

    Returns
    -------
    LrrResult
        ``residual`` is the larger of the two constraint violations.
    """
    X = as_data_matrix(X, "X")
    n = X.shape[1]
    if not np.any(X):
        return LrrResult(np.zeros((n, n)), np.zeros_like(X), 0, True, 0.0)

    lam = cfg.lam
    mu0, mu_max = cfg.resolve(X)
    ls = _LeastSquares(X)
    Z = np.zeros((n, n))
    J = np.zeros((n, n))
    E = np.zeros_like(X)
    Y1 = np.zeros_like(X)
    Y2 = np.zeros((n, n))
    residual = max_abs(X)
    history = []
    k = 0
    while residual >= cfg.eps and k < cfg.max_iter:
        mu = _penalty(mu0, cfg.rho, mu_max, k)
        J, rank = svt_with_rank(Z + Y2 / mu, 1.0 / mu)
        Z = ls.solve(ls.XtX - X.T @ E + J + (X.T @ Y1 - Y2) / mu)
        XZ = X @ Z
        E = column_shrink(X - XZ + Y1 / mu, lam / mu)
        R1 = X - XZ - E
        R2 = Z - J
        Y1 = Y1 + mu * R1
        Y2 = Y2 + mu * R2
        residual = max(max_abs(R1), max_abs(R2))
        k += 1
        history.append(IterationRecord(k, residual, mu, rank, _count_nonzero_columns(E)))
    return LrrResult(Z, E, k, residual < cfg.eps, residual, history)


def solve_lrr_noiseless(X, cfg):
    """Minimum nuclear norm `Z` with ``X = XZ``, found iteratively.

    ``cfg.lam`` is ignored. The result is returned as an :class:`LrrResult`
    whose ``E`` is identically zero.
    """
    X = as_data_matrix(X, "X")
    if not np.any(X):
        raise InvalidInputError("X must be nonzero")
    n = X.shape[1]
    mu0, mu_max = cfg.resolve(X)
    ls = _LeastSquares(X)
    Z = np.zeros((n, n))
    J = np.zeros((n, n))
    Y1 = np.zeros_like(X)
    Y2 = np.zeros((n, n))
    residual = max_abs(X)
    history = []
    k = 0
    while residual >= cfg.eps and k < cfg.max_iter:
        mu = _penalty(mu0, cfg.rho, mu_max, k)
        J, rank = svt_with_rank(Z + Y2 / mu, 1.0 / mu)
        Z = ls.solve(ls.XtX + J + (X.T @ Y1 - Y2) / mu)
        R1 = X - X @ Z
        R2 = Z - J
        Y1 = Y1 + mu * R1
        Y2 = Y2 + mu * R2
        residual = max(max_abs(R1), max_abs(R2))
        k += 1
        history.append(IterationRecord(k, residual, mu, rank, 0))
    return LrrResult(Z, np.zeros_like(X), k, residual < cfg.eps, residual, history)
