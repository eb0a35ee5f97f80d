"""From a representation matrix to cluster labels, and scoring of labels."""

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment
from sklearn.cluster import KMeans

from .errors import InvalidInputError

SYMMETRY_TOL = 1e-6
N_RESTARTS = 20


def _square(Z, name="Z"):
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {Z.shape}")
    if not np.all(np.isfinite(Z)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return Z


def affinity_lrr(Z):
    """``|Z| + |Z'|``, the affinity used with low rank representation."""
    Z = _square(Z)
    A = np.abs(Z)
    return A + A.T


def affinity_rsi(Z, tol=SYMMETRY_TOL):
    """``|Z|`` for a symmetric representation such as a shape interaction matrix.

    `Z` is symmetrized by averaging with its transpose first; asymmetry larger
    than `tol` (max-norm) is rejected.
    """
    Z = _square(Z)
    asym = np.max(np.abs(Z - Z.T)) if Z.size else 0.0
    if asym > tol:
        raise InvalidInputError(f"Z is not symmetric (max asymmetry {asym:.3g} > {tol:g})")
    return np.abs((Z + Z.T) / 2.0)


def spectral_embedding(W, k):
    """Row-normalized bottom-`k` eigenvectors of the symmetric normalized Laplacian."""
    W = _square(W, "W")
    n = W.shape[0]
    if np.any(W < 0):
        raise InvalidInputError("affinity must be nonnegative")
    W = (W + W.T) / 2.0
    deg = W.sum(axis=1)
    isolated = deg <= 0
    if np.any(isolated):
        W = W.copy()
        W[isolated, isolated] = 1.0
        deg = W.sum(axis=1)
    d = 1.0 / np.sqrt(deg)
    # bottom eigenvectors of I - D^-1/2 W D^-1/2 are the top ones of the normalized affinity
    M = d[:, None] * W * d[None, :]
    _, vecs = scipy.linalg.eigh(M, subset_by_index=[n - k, n - 1])
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    return np.divide(vecs, norms, out=np.zeros_like(vecs), where=norms > 0)


def spectral_cluster(W, k, seed=0):
    """Normalized spectral clustering of affinity `W` into `k` groups.

    k-means on the spectral embedding uses k-means++ seeding driven by `seed`
    and keeps the best of 20 restarts by within-cluster sum of squares.

    Returns
    -------
    labels : ndarray of int, shape (n,)
    """
    W = _square(W, "W")
    n = W.shape[0]
    if int(k) != k or k < 1:
        raise InvalidInputError(f"k must be a positive integer, got {k}")
    if k > n:
        raise InvalidInputError(f"k={k} exceeds the number of samples n={n}")
    if k == 1:
        return np.zeros(n, dtype=np.int64)
    emb = spectral_embedding(W, k)
    km = KMeans(n_clusters=k, init="k-means++", n_init=N_RESTARTS,
                random_state=np.random.RandomState(seed), algorithm="lloyd")
    return km.fit_predict(emb).astype(np.int64)


def confusion_matrix(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    C = np.zeros((p.max() + 1, t.max() + 1), dtype=np.int64)
    np.add.at(C, (p, t), 1)
    return C


def segmentation_accuracy(pred, truth):
    """Best fraction of agreeing labels over all one-to-one relabelings of `pred`.

    Solved exactly as an assignment problem on the confusion matrix. The
    segmentation error rate is ``1 - accuracy``.
    """
    pred = np.ravel(pred)
    truth = np.ravel(truth)
    if pred.shape != truth.shape:
        raise InvalidInputError(f"label lengths differ: {pred.size} vs {truth.size}")
    if pred.size == 0:
        raise InvalidInputError("labels are empty")
    C = confusion_matrix(pred, truth)
    rows, cols = linear_sum_assignment(C, maximize=True)
    return float(C[rows, cols].sum()) / pred.size
