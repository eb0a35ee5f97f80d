"""End-to-end segmentation methods, LRR and SIM equivalence checks and the outlier sweep."""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from threadpoolctl import threadpool_limits

from .clustering import affinity_lrr, affinity_rsi, segmentation_accuracy, spectral_cluster
from .errors import DegenerateInputError, InvalidInputError, SubsegError
from .linalg import (DEFAULT_RANK_TOL, THRESHOLDED_RANK_TOL, as_data_matrix, max_abs,
                     nuclear_norm, numerical_rank, sim)
from .solvers import solve_csrpca, solve_lrr_noiseless, solve_lrr_noisy
from .synthgen import generate

METHODS = ("lrr", "rsi")
_METHOD_ID = {"lrr": 0, "rsi": 1}


@dataclass
class MethodReport:
    method: str
    labels: np.ndarray
    Z: np.ndarray
    D: np.ndarray
    E: np.ndarray
    iterations: int
    converged: bool
    residual: float
    rank_D: int
    accuracy: float | None = None


def _check_k(k, n):
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise InvalidInputError(f"k must be a positive integer, got {k!r}")
    if k > n:
        raise InvalidInputError(f"k={k} exceeds the number of samples n={n}")


def _score(report, truth):
    if truth is not None:
        truth = np.ravel(truth)
        if truth.size != report.labels.size:
            raise InvalidInputError(
                f"truth has {truth.size} labels but the data has {report.labels.size} samples")
        report.accuracy = segmentation_accuracy(report.labels, truth)
    return report


def run_rsi(X, k, cfg, seed=0, truth=None, rank_tol=THRESHOLDED_RANK_TOL):
    """Robust shape interaction: denoise, take the SIM of the clean part, cluster ``|Z|``.

    Raises
    ------
    DegenerateInputError
        If the recovered low-rank part is identically zero.
    """
    X = as_data_matrix(X, "X")
    _check_k(k, X.shape[1])
    res = solve_csrpca(X, cfg)
    if not np.any(res.D):
        raise DegenerateInputError("low-rank part is zero; lam is too small for this data")
    Z = sim(res.D, rank_tol)
    labels = spectral_cluster(affinity_rsi(Z), k, seed)
    report = MethodReport("rsi", labels, Z, res.D, res.E, res.iterations, res.converged,
                          res.residual, numerical_rank(res.D, rank_tol))
    return _score(report, truth)


def run_lrr(X, k, cfg, seed=0, truth=None, rank_tol=THRESHOLDED_RANK_TOL):
    """Low rank representation with ``|Z| + |Z'|`` as the affinity.

    The reported ``D`` is ``X @ Z``.
    """
    X = as_data_matrix(X, "X")
    _check_k(k, X.shape[1])
    res = solve_lrr_noisy(X, cfg)
    labels = spectral_cluster(affinity_lrr(res.Z), k, seed)
    D = X @ res.Z
    rank = numerical_rank(D, rank_tol) if np.any(D) else 0
    report = MethodReport("lrr", labels, res.Z, D, res.E, res.iterations, res.converged,
                          res.residual, rank)
    return _score(report, truth)


def run_method(method, X, k, cfg, seed=0, truth=None, rank_tol=THRESHOLDED_RANK_TOL):
    if method == "rsi":
        return run_rsi(X, k, cfg, seed, truth, rank_tol)
    if method == "lrr":
        return run_lrr(X, k, cfg, seed, truth, rank_tol)
    raise InvalidInputError(f"unknown method {method!r}; expected one of {METHODS}")


def denoise(X, cfg, method="rsi"):
    """Split `X` into corrected data ``D`` and noise ``E``.

    For ``"lrr"`` the corrected data is ``X @ Z``.
    """
    X = as_data_matrix(X, "X")
    if method == "rsi":
        res = solve_csrpca(X, cfg)
        return res.D, res.E
    if method == "lrr":
        res = solve_lrr_noisy(X, cfg)
        return X @ res.Z, res.E
    raise InvalidInputError(f"unknown method {method!r}; expected one of {METHODS}")


@dataclass(frozen=True)
class Theorem3Report:
    sim_gap: float
    nuclear_gap: float
    feasibility_gap: float
    rank: int
    iterations: int
    converged: bool


def theorem3_verify(X, cfg, rank_tol=DEFAULT_RANK_TOL):
    """Compare the iterative noiseless LRR solution with ``SIM(X)``.

    Returns the relative Frobenius distance to ``SIM(X)``, the distance of
    ``||Z||_*`` from ``rank(X)``, and the max-norm residual of ``X = XZ``.
    """
    X = as_data_matrix(X, "X")
    S = sim(X, rank_tol)
    r = numerical_rank(X, rank_tol)
    res = solve_lrr_noiseless(X, cfg)
    Z = res.Z
    return Theorem3Report(
        sim_gap=float(np.linalg.norm(Z - S) / np.linalg.norm(S)),
        nuclear_gap=abs(nuclear_norm(Z) - r),
        feasibility_gap=max_abs(X - X @ Z),
        rank=r,
        iterations=res.iterations,
        converged=res.converged,
    )


@dataclass(frozen=True)
class BlockReport:
    max_off_block: float
    block_ranks: dict
    block_sizes: dict


def block_structure(S, labels, rank_tol=DEFAULT_RANK_TOL):
    """Largest entry of `S` linking different groups, and the rank of each diagonal block."""
    S = np.asarray(S, dtype=np.float64)
    labels = np.ravel(labels)
    if S.shape != (labels.size, labels.size):
        raise InvalidInputError(f"matrix of shape {S.shape} does not match {labels.size} labels")
    off = labels[:, None] != labels[None, :]
    max_off = float(np.max(np.abs(S[off]))) if np.any(off) else 0.0
    ranks, sizes = {}, {}
    for g in np.unique(labels):
        idx = np.flatnonzero(labels == g)
        block = S[np.ix_(idx, idx)]
        ranks[int(g)] = numerical_rank(block, rank_tol) if np.any(block) else 0
        sizes[int(g)] = idx.size
    return BlockReport(max_off, ranks, sizes)


def derive_seed(seed, *keys):
    """A 32-bit seed that depends only on `seed` and the integer `keys`."""
    return int(np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1)[0])


def fraction_key(fraction):
    return int(round(fraction * 1_000_000))


@dataclass(frozen=True)
class SweepRow:
    fraction: float
    method: str
    trial: int
    accuracy: float


@dataclass(frozen=True)
class SummaryRow:
    fraction: float
    method: str
    mean: float
    std: float


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)

    @property
    def summary(self):
        cells = {}
        for row in self.rows:
            cells.setdefault((row.fraction, row.method), []).append(row.accuracy)
        out = []
        for (fraction, method), accs in cells.items():
            a = np.array([x for x in accs if not math.isnan(x)])
            mean = float(a.mean()) if a.size else math.nan
            std = float(a.std(ddof=1)) if a.size > 1 else math.nan
            out.append(SummaryRow(fraction, method, mean, std))
        return out

    def table(self):
        """``{(fraction, method): (mean, std)}``."""
        return {(s.fraction, s.method): (s.mean, s.std) for s in self.summary}


def resolve_workers(workers=None):
    """Worker count from the argument or ``SUBSEG_THREADS`` (0 or unset means all CPUs)."""
    if workers is None:
        raw = os.environ.get("SUBSEG_THREADS", "0").strip() or "0"
        try:
            workers = int(raw)
        except ValueError:
            raise InvalidInputError(f"SUBSEG_THREADS must be an integer, got {raw!r}") from None
    if workers < 0:
        raise InvalidInputError(f"worker count must be nonnegative, got {workers}")
    return workers or (os.cpu_count() or 1)


def _sweep_cell(args):
    spec, fraction, trial, cfgs, seed, rank_tol = args
    fkey = fraction_key(fraction)
    trial_spec = replace(spec, outlier_fraction=fraction, seed=derive_seed(seed, 0, fkey, trial))
    out = []
    # single-threaded BLAS keeps results independent of the worker layout
    with threadpool_limits(limits=1):
        X, gt = generate(trial_spec)
        for method in METHODS:
            spectral_seed = derive_seed(seed, 1, fkey, trial, _METHOD_ID[method])
            try:
                rep = run_method(method, X, spec.k, cfgs[method], spectral_seed, gt.labels, rank_tol)
                acc = rep.accuracy if rep.converged else math.nan
            except SubsegError:
                acc = math.nan
            out.append(SweepRow(float(fraction), method, trial, acc))
    return out


def outlier_sweep(spec, fractions, trials, cfg_lrr, cfg_rsi, seed=0, workers=None,
                  rank_tol=THRESHOLDED_RANK_TOL):
    """Accuracy of both methods over outlier fractions, `trials` fresh draws each.

    Data for a cell depends only on ``(seed, fraction, trial)``, so cells can
    be dropped or reordered without changing the others. A trial whose solver
    fails or does not converge is recorded with accuracy NaN.

    Parameters
    ----------
    spec : SyntheticSpec
        Template; its ``outlier_fraction`` and ``seed`` are overridden.
    workers : int, optional
        Process count; defaults to ``SUBSEG_THREADS``.
    """
    fractions = [float(f) for f in fractions]
    if any(not 0.0 <= f <= 1.0 for f in fractions):
        raise InvalidInputError("fractions must lie in [0, 1]")
    if isinstance(trials, bool) or int(trials) != trials or trials < 2:
        raise InvalidInputError(f"trials must be an integer >= 2, got {trials!r}")
    cfgs = {"lrr": cfg_lrr, "rsi": cfg_rsi}
    tasks = [(spec, f, t, cfgs, seed, rank_tol) for f in fractions for t in range(int(trials))]
    workers = min(resolve_workers(workers), len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_sweep_cell, tasks))
    else:
        chunks = [_sweep_cell(t) for t in tasks]
    return SweepResult([row for chunk in chunks for row in chunk])


@dataclass(frozen=True)
class HopkinsResult:
    names: list
    errors: dict

    def mean_error(self, method):
        return float(np.mean(self.errors[method]))

    def median_error(self, method):
        return float(np.median(self.errors[method]))


def hopkins_benchmark(root, cfg_lrr, cfg_rsi, seed=0):
    """Segmentation error rate of both methods on every sequence under `root`.

    Each sequence directory follows :func:`subseg.io.load_hopkins_sequence`;
    the number of motions is taken from its labels.
    """
    from .io import find_hopkins_sequences, load_hopkins_sequence

    cfgs = {"lrr": cfg_lrr, "rsi": cfg_rsi}
    names, errors = [], {m: [] for m in METHODS}
    for path in find_hopkins_sequences(root):
        X, truth = load_hopkins_sequence(path)
        k = np.unique(truth).size
        names.append(path.name)
        for method in METHODS:
            rep = run_method(method, X, k, cfgs[method], seed, truth)
            errors[method].append(1.0 - rep.accuracy)
    return HopkinsResult(names, errors)
