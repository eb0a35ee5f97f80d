"""Dense decompositions and proximal operators.

Everything here works on plain ``numpy`` arrays whose columns are samples.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError, DegenerateInputError, InvalidInputError

#: Relative singular value cutoff used for clean data.
DEFAULT_RANK_TOL = 1e-8
#: Cutoff used on the output of singular value thresholding, whose spectrum
#: is cleanly separated from zero.
THRESHOLDED_RANK_TOL = 1e-6


@dataclass(frozen=True)
class SvdFactors:
    """Skinny SVD ``A ~= U @ diag(sigma) @ V.T`` truncated to numerical rank."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    @property
    def rank(self):
        return self.sigma.shape[0]

    def reconstruct(self):
        return (self.U * self.sigma) @ self.V.T


def as_data_matrix(A, name="A"):
    """Return ``A`` as a 2-D float64 array, raising on NaN/inf or empty input."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {A.shape}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidInputError(f"{name} must be non-empty, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return A


def _svd(A):
    try:
        return np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD did not converge: {exc}") from exc


def skinny_svd(A, rank_tol=DEFAULT_RANK_TOL):
    """Skinny SVD of `A` truncated to its numerical rank.

    Singular values at or below ``rank_tol * sigma_max`` are discarded. The
    all-zero matrix gives rank 0 and empty factors.

    Parameters
    ----------
    A : array_like, shape (m, n)
    rank_tol : float
        Relative threshold in (0, 1).

    Returns
    -------
    SvdFactors
    """
    A = as_data_matrix(A)
    if not 0.0 < rank_tol < 1.0:
        raise InvalidInputError(f"rank_tol must lie in (0, 1), got {rank_tol}")
    U, s, Vt = _svd(A)
    if s.size == 0 or s[0] == 0.0:
        r = 0
    else:
        r = int(np.count_nonzero(s > rank_tol * s[0]))
    return SvdFactors(U=U[:, :r].copy(), sigma=s[:r].copy(), V=Vt[:r].T.copy())


def numerical_rank(A, rank_tol=DEFAULT_RANK_TOL):
    A = as_data_matrix(A)
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_tol * s[0]))


def soft_threshold(x, tau):
    """Entrywise ``max(|x| - tau, 0) * sign(x)``."""
    x = np.asarray(x, dtype=np.float64)
    return np.maximum(np.abs(x) - tau, 0.0) * np.sign(x)


def svt(A, tau):
    """Singular value thresholding: ``U @ diag(soft_threshold(s, tau)) @ V.T``.

    This is the proximal operator of ``tau * ||.||_*``.
    """
    A = as_data_matrix(A)
    if tau < 0:
        raise InvalidInputError(f"tau must be nonnegative, got {tau}")
    U, s, Vt = _svd(A)
    s = soft_threshold(s, tau)
    keep = s > 0
    return (U[:, keep] * s[keep]) @ Vt[keep]


def svt_with_rank(A, tau):
    """Like :func:`svt` but also return the number of surviving singular values."""
    A = as_data_matrix(A)
    U, s, Vt = _svd(A)
    s = soft_threshold(s, tau)
    keep = s > 0
    return (U[:, keep] * s[keep]) @ Vt[keep], int(np.count_nonzero(keep))


def column_shrink(Q, tau):
    """Shrink each column of `Q` toward zero by `tau` in Euclidean norm.

    Column ``q`` becomes ``max(||q|| - tau, 0) * q / ||q||``; a zero column
    stays zero. This is the proximal operator of ``tau * ||.||_{2,1}``.
    """
    Q = as_data_matrix(Q, "Q")
    if tau < 0:
        raise InvalidInputError(f"tau must be nonnegative, got {tau}")
    norms = np.linalg.norm(Q, axis=0)
    scale = np.zeros_like(norms)
    nz = norms > tau
    scale[nz] = (norms[nz] - tau) / norms[nz]
    return Q * scale


def sim(A, rank_tol=DEFAULT_RANK_TOL):
    """Shape interaction matrix ``V_r @ V_r.T`` of `A`.

    Raises
    ------
    DegenerateInputError
        If `A` has numerical rank 0.
    """
    f = skinny_svd(A, rank_tol)
    if f.rank == 0:
        raise DegenerateInputError("shape interaction matrix is undefined for a rank-0 matrix")
    return f.V @ f.V.T


def nuclear_norm(A):
    return float(np.sum(np.linalg.svd(np.asarray(A, dtype=np.float64), compute_uv=False)))


def norm21(E):
    """Sum of the Euclidean norms of the columns of `E`."""
    return float(np.sum(np.linalg.norm(E, axis=0)))


def max_abs(A):
    A = np.asarray(A)
    return float(np.max(np.abs(A))) if A.size else 0.0
