"""Subspace segmentation by low rank representation (LRR) and robust shape interaction (RSI)."""

from .clustering import affinity_lrr, affinity_rsi, segmentation_accuracy, spectral_cluster
from .errors import DecompositionError, DegenerateInputError, InvalidInputError, SubsegError
from .linalg import SvdFactors, column_shrink, sim, skinny_svd, svt
from .pipeline import (MethodReport, SweepResult, denoise, outlier_sweep, run_lrr, run_rsi,
                       theorem3_verify)
from .solvers import (AlmConfig, CsrpcaResult, LrrResult, solve_csrpca, solve_lrr_noiseless,
                      solve_lrr_noisy)
from .synthgen import GroundTruth, SyntheticSpec, benchmark_spec, generate

__version__ = "0.1.0"

__all__ = [
    "affinity_lrr", "affinity_rsi", "segmentation_accuracy", "spectral_cluster",
    "DecompositionError", "DegenerateInputError", "InvalidInputError", "SubsegError",
    "SvdFactors", "column_shrink", "sim", "skinny_svd", "svt", "MethodReport",
    "SweepResult", "denoise", "outlier_sweep", "run_lrr", "run_rsi", "theorem3_verify",
    "AlmConfig", "CsrpcaResult", "LrrResult", "solve_csrpca", "solve_lrr_noiseless",
    "solve_lrr_noisy", "GroundTruth", "SyntheticSpec", "generate", "benchmark_spec",
]
