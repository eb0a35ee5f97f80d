"""Synthetic union-of-subspaces data with Gaussian noise and outlier columns."""

from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import InvalidInputError


NOISE_MODELS = ("total", "entry_std")


def _noise_std(model, factor, norms, m):
    if model == "total":
        return np.sqrt(factor * norms / m)
    return factor * norms


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the generator.

    ``noise_model`` fixes how a factor ``c`` turns into Gaussian noise on a
    clean point ``p``:

    ``"total"``
        i.i.d. entries of variance ``c * ||p|| / ambient_dim``, so the noise
        has total expected squared norm ``c * ||p||``.
    ``"entry_std"``
        i.i.d. entries of standard deviation ``c * ||p||`` (the usual
        ``p + c * norm(p) * randn(m, 1)`` construction). Much heavier.

    Every point gets noise with ``c = noise_variance_factor``; outliers get a
    second draw with ``c = outlier_variance_factor``.
    """

    k: int = 5
    subspace_dim: int = 4
    ambient_dim: int = 100
    points_per_subspace: int = 20
    noise_variance_factor: float = 0.1
    outlier_fraction: float = 0.0
    outlier_variance_factor: float = 1.0
    seed: int = 0
    noise_model: str = "total"

    def __post_init__(self):
        if self.noise_model not in NOISE_MODELS:
            raise InvalidInputError(
                f"noise_model must be one of {', '.join(NOISE_MODELS)}, got {self.noise_model!r}")
        for name in ("k", "subspace_dim", "ambient_dim", "points_per_subspace"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise InvalidInputError(f"{name} must be a positive integer, got {value!r}")
        if self.k * self.subspace_dim > self.ambient_dim:
            raise InvalidInputError(
                f"k * subspace_dim = {self.k * self.subspace_dim} exceeds ambient_dim = "
                f"{self.ambient_dim}; subspaces cannot be independent")
        if not 0.0 <= self.outlier_fraction <= 1.0:
            raise InvalidInputError(f"outlier_fraction must lie in [0, 1], got {self.outlier_fraction}")
        for name in ("noise_variance_factor", "outlier_variance_factor"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise InvalidInputError(f"{name} must be a nonnegative number, got {value!r}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or self.seed < 0:
            raise InvalidInputError(f"seed must be a nonnegative integer, got {self.seed!r}")

    @property
    def n(self):
        return self.k * self.points_per_subspace

    @property
    def n_outliers(self):
        # round() is round-half-to-even
        return int(round(self.outlier_fraction * self.n))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidInputError(f"unknown field(s) in synthetic spec: {', '.join(sorted(unknown))}")
        return cls(**d)


@dataclass(frozen=True)
class GroundTruth:
    labels: np.ndarray
    outlier_mask: np.ndarray
    clean: np.ndarray
    bases: tuple = ()


def generate(spec):
    """Draw a data matrix and its ground truth from `spec`.

    Returns
    -------
    X : ndarray, shape (ambient_dim, k * points_per_subspace)
        Samples grouped by subspace.
    gt : GroundTruth
    """
    if not isinstance(spec, SyntheticSpec):
        raise InvalidInputError("spec must be a SyntheticSpec")
    rng = np.random.default_rng(spec.seed)
    m, r, d = spec.ambient_dim, spec.subspace_dim, spec.points_per_subspace

    bases = []
    blocks = []
    for _ in range(spec.k):
        B, _ = np.linalg.qr(rng.standard_normal((m, r)))
        bases.append(B)
        blocks.append(B @ rng.standard_normal((r, d)))
    clean = np.hstack(blocks)
    labels = np.repeat(np.arange(spec.k), d)
    norms = np.linalg.norm(clean, axis=0)

    X = clean + rng.standard_normal(clean.shape) * _noise_std(
        spec.noise_model, spec.noise_variance_factor, norms, m)

    mask = np.zeros(spec.n, dtype=bool)
    idx = rng.choice(spec.n, size=spec.n_outliers, replace=False)
    mask[idx] = True
    X[:, idx] += rng.standard_normal((m, idx.size)) * _noise_std(
        spec.noise_model, spec.outlier_variance_factor, norms[idx], m)

    return X, GroundTruth(labels=labels, outlier_mask=mask, clean=clean, bases=tuple(bases))


def benchmark_spec(outlier_fraction=0.0, seed=0, noise_model="entry_std"):
    """Five 4-dimensional subspaces in R^100, 20 points each, factors 0.1 / 1.0."""
    return SyntheticSpec(k=5, subspace_dim=4, ambient_dim=100, points_per_subspace=20,
                         noise_variance_factor=0.1, outlier_fraction=outlier_fraction,
                         outlier_variance_factor=1.0, seed=seed, noise_model=noise_model)
