"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input or
configuration, 3 file system error.
"""

import argparse
import json
import math
import os
import sys
from contextlib import nullcontext
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import io
from .errors import InvalidInputError, SubsegError
from .linalg import DEFAULT_RANK_TOL, THRESHOLDED_RANK_TOL, numerical_rank, sim
from .pipeline import (METHODS, block_structure, denoise, hopkins_benchmark, outlier_sweep,
                       resolve_workers, run_method, theorem3_verify)
from .solvers import AlmConfig
from .synthgen import SyntheticSpec, generate

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3

# documented PASS thresholds for `verify`
THEOREM3_TOL = 1e-3
FEASIBILITY_TOL = 1e-6
OFF_BLOCK_TOL = 1e-8

_ALM_KEYS = ("lambda", "mu0", "rho", "mu_max", "eps", "max_iter")
_RUN_KEYS = _ALM_KEYS + ("method", "k", "seed", "rank_tol", "input", "truth", "output_dir")
_SWEEP_KEYS = ("fractions", "trials", "lambda_lrr", "lambda_rsi", "seed", "mu0", "rho",
               "mu_max", "eps", "max_iter", "rank_tol", "output_dir", "spec")


def _add_common(p):
    p.add_argument("--config", help="JSON file of settings; flags override file values")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--lambda", dest="lambda_", type=float, metavar="LAMBDA")
    p.add_argument("--k", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--mu0", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--rank-tol", dest="rank_tol", type=float)
    p.add_argument("--input")
    p.add_argument("--truth")
    p.add_argument("--output-dir", dest="output_dir")


def build_parser():
    parser = argparse.ArgumentParser(prog="subseg", description="Subspace segmentation by LRR and RSI.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("generate", "draw a synthetic union-of-subspaces data set"),
        ("cluster", "segment a data matrix"),
        ("denoise", "split a data matrix into corrected data and noise"),
        ("verify", "check the SIM block structure and LRR/SIM equivalence"),
        ("sweep", "accuracy of LRR and RSI over outlier fractions"),
        ("hopkins", "error rates on preprocessed motion sequences"),
    ]:
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        if name in ("sweep", "hopkins"):
            p.add_argument("--lambda-lrr", dest="lambda_lrr", type=float)
            p.add_argument("--lambda-rsi", dest="lambda_rsi", type=float)
        if name == "sweep":
            p.add_argument("--trials", type=int)
            p.add_argument("--plot", action="store_true", help="also write sweep.svg")
    return parser


def _settings(args, allowed):
    """Merge the config file (if any) with explicit flags."""
    cfg = {}
    if args.config:
        cfg = io.read_config(args.config)
        unknown = set(cfg) - set(allowed)
        if unknown:
            raise InvalidInputError(f"unknown config field(s): {', '.join(sorted(unknown))}")
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config", "plot")}
    if "lambda_" in flags:
        flags["lambda"] = flags.pop("lambda_")
    cfg.update(flags)
    return cfg


def _number(settings, key, kind, default=None):
    value = settings.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidInputError(f"{key} must be a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise InvalidInputError(f"{key} must be an integer, got {value!r}")
        return int(value)
    return float(value)


def _alm(settings, lam_key="lambda", default_eps=1e-7):
    lam = _number(settings, lam_key, float)
    if lam is None:
        raise InvalidInputError(f"{lam_key} is required")
    try:
        return AlmConfig(
            lam=lam,
            mu0=_number(settings, "mu0", float),
            rho=_number(settings, "rho", float, 1.5),
            mu_max=_number(settings, "mu_max", float),
            eps=_number(settings, "eps", float, default_eps),
            max_iter=_number(settings, "max_iter", int, 1000),
        )
    except InvalidInputError as exc:
        raise InvalidInputError(f"{lam_key}/ALM settings: {exc}") from exc


def _rank_tol(settings, default):
    tol = _number(settings, "rank_tol", float, default)
    if not 0.0 < tol < 1.0:
        raise InvalidInputError(f"rank_tol must lie in (0, 1), got {tol}")
    return tol


def _require(settings, key):
    if settings.get(key) is None:
        raise InvalidInputError(f"{key} is required")
    return settings[key]


def _output_dir(settings):
    out = Path(settings.get("output_dir") or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _spec_from(d):
    try:
        return SyntheticSpec.from_dict(d)
    except TypeError as exc:
        raise InvalidInputError(str(exc)) from exc


def cmd_generate(args):
    if not args.config:
        raise InvalidInputError("generate needs --config with the synthetic spec")
    spec_dict = io.read_config(args.config)
    if args.seed is not None:
        spec_dict["seed"] = args.seed
    spec = _spec_from(spec_dict)
    X, gt = generate(spec)
    out = _output_dir({"output_dir": args.output_dir})
    io.write_matrix(out / "X.csv", X)
    io.write_labels(out / "labels.csv", gt.labels)
    io.write_labels(out / "outliers.csv", gt.outlier_mask.astype(int))
    print(f"wrote {X.shape[0]}x{X.shape[1]} data matrix, {int(gt.outlier_mask.sum())} outliers, to {out}")
    return EXIT_OK


def _load_input(settings):
    X = io.read_matrix(_require(settings, "input"))
    truth = None
    if settings.get("truth"):
        truth = io.read_labels(settings["truth"])
        if truth.size != X.shape[1]:
            raise InvalidInputError(f"truth has {truth.size} labels but X has {X.shape[1]} columns")
    return X, truth


def cmd_cluster(args):
    s = _settings(args, _RUN_KEYS)
    method = s.get("method", "rsi")
    if method not in METHODS:
        raise InvalidInputError(f"method must be one of {METHODS}, got {method!r}")
    cfg = _alm(s)
    k = _number(s, "k", int)
    if k is None:
        raise InvalidInputError("k is required")
    X, truth = _load_input(s)
    rep = run_method(method, X, k, cfg, _number(s, "seed", int, 0), truth,
                     _rank_tol(s, THRESHOLDED_RANK_TOL))
    out = _output_dir(s)
    io.write_labels(out / "labels.csv", rep.labels)
    report = {
        "method": method, "lambda": cfg.lam, "k": k, "n": int(X.shape[1]),
        "iterations": rep.iterations, "converged": bool(rep.converged),
        "residual": rep.residual, "rank_D": rep.rank_D, "accuracy": rep.accuracy,
    }
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    for key, value in report.items():
        print(f"{key:>10}: {value}")
    return EXIT_OK


def cmd_denoise(args):
    s = _settings(args, _RUN_KEYS)
    method = s.get("method", "rsi")
    if method not in METHODS:
        raise InvalidInputError(f"method must be one of {METHODS}, got {method!r}")
    cfg = _alm(s)
    X, _ = _load_input(s)
    D, E = denoise(X, cfg, method)
    out = _output_dir(s)
    io.write_matrix(out / "D.csv", D)
    io.write_matrix(out / "E.csv", E)
    ncols = int(np.count_nonzero(np.any(E != 0, axis=0)))
    print(f"{method}: wrote D.csv and E.csv to {out}; {ncols} of {X.shape[1]} columns carry noise")
    return EXIT_OK


def _verdict(ok, strict=True):
    if not strict:
        return "INFO"
    return "PASS" if ok else "FAIL"


def cmd_verify(args):
    s = _settings(args, _RUN_KEYS + tuple(SyntheticSpec.__dataclass_fields__))
    rank_tol = _rank_tol(s, DEFAULT_RANK_TOL)
    if s.get("input"):
        X, truth = _load_input(s)
        clean = None
    else:
        if not args.config:
            raise InvalidInputError("verify needs --input or a --config synthetic spec")
        spec_fields = {k: v for k, v in io.read_config(args.config).items()
                       if k in SyntheticSpec.__dataclass_fields__}
        if args.seed is not None:
            spec_fields["seed"] = args.seed
        spec = _spec_from(spec_fields)
        X, gt = generate(spec)
        truth = gt.labels
        clean = spec.noise_variance_factor == 0 and (spec.outlier_fraction == 0
                                                      or spec.outlier_variance_factor == 0)
    if not np.any(X):
        raise InvalidInputError("X has rank 0; the shape interaction matrix is undefined")
    r = numerical_rank(X, rank_tol)
    if r == 0:
        raise InvalidInputError("X has rank 0; the shape interaction matrix is undefined")

    cfg = AlmConfig(eps=_number(s, "eps", float, 1e-8), max_iter=_number(s, "max_iter", int, 1000),
                    rho=_number(s, "rho", float, 1.5), mu0=_number(s, "mu0", float))
    t3 = theorem3_verify(X, cfg, rank_tol)
    failed = False
    lines = [f"data: {X.shape[0]}x{X.shape[1]}, numerical rank {r} (rank_tol {rank_tol:g})"]
    for label, value, tol in [("SIM gap", t3.sim_gap, THEOREM3_TOL),
                              ("nuclear-norm gap", t3.nuclear_gap, THEOREM3_TOL),
                              ("feasibility gap", t3.feasibility_gap, FEASIBILITY_TOL)]:
        ok = value <= tol
        failed |= not ok
        lines.append(f"{_verdict(ok)}  {label:<18} {value:.3e}  (tol {tol:g})")

    if truth is not None:
        groups = np.unique(truth)
        group_ranks = {int(g): numerical_rank(X[:, truth == g], rank_tol) for g in groups}
        if clean is None:
            # independent subspaces and genuinely low-rank data
            clean = sum(group_ranks.values()) == r < min(X.shape)
        blocks = block_structure(sim(X, rank_tol), truth, rank_tol)
        ok = blocks.max_off_block <= OFF_BLOCK_TOL
        failed |= clean and not ok
        lines.append(f"{_verdict(ok, clean)}  {'max off-block':<18} {blocks.max_off_block:.3e}"
                     f"  (tol {OFF_BLOCK_TOL:g})")
        for g in blocks.block_ranks:
            ok = blocks.block_ranks[g] == group_ranks[g]
            failed |= clean and not ok
            lines.append(f"{_verdict(ok, clean)}  block {g} rank{'':<9} {blocks.block_ranks[g]}"
                         f"  (expected {group_ranks[g]}, size {blocks.block_sizes[g]})")
        if not clean:
            lines.append("data is not clean low-rank subspace data; block checks are informational")
    print("\n".join(lines))
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _fmt(x):
    return "nan" if math.isnan(x) else format(x, ".12g")


def write_sweep_csv(out, result):
    rows = ["fraction,method,trial,accuracy"]
    rows += [f"{_fmt(r.fraction)},{r.method},{r.trial},{_fmt(r.accuracy)}" for r in result.rows]
    (out / "results.csv").write_text("\n".join(rows) + "\n")
    summary = ["fraction,method,mean,std"]
    summary += [f"{_fmt(r.fraction)},{r.method},{_fmt(r.mean)},{_fmt(r.std)}" for r in result.summary]
    (out / "summary.csv").write_text("\n".join(summary) + "\n")


def plot_sweep(path, result):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for method in METHODS:
        rows = [r for r in result.summary if r.method == method]
        x = np.array([r.fraction for r in rows]) * 100
        ax.errorbar(x, [r.mean for r in rows], yerr=[r.std for r in rows], marker="o",
                    capsize=3, label=method.upper())
    ax.set_xlabel("outliers (%)")
    ax.set_ylabel("segmentation accuracy")
    ax.legend()
    fig.tight_layout()
    # fixed metadata keeps the SVG reproducible
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def cmd_sweep(args):
    s = _settings(args, _SWEEP_KEYS)
    spec = _spec_from(s.get("spec", {}))
    fractions = _require(s, "fractions")
    if not isinstance(fractions, list) or not fractions:
        raise InvalidInputError("fractions must be a non-empty list")
    for f in fractions:
        if isinstance(f, bool) or not isinstance(f, (int, float)) or not 0 <= f <= 1:
            raise InvalidInputError(f"fractions must be numbers in [0, 1], got {f!r}")
    trials = _number(s, "trials", int)
    if trials is None or trials < 2:
        raise InvalidInputError(f"trials must be an integer >= 2, got {s.get('trials')!r}")
    if "lambda" in s:
        s.setdefault("lambda_lrr", s["lambda"])
        s.setdefault("lambda_rsi", s["lambda"])
    cfg_lrr = _alm(s, "lambda_lrr")
    cfg_rsi = _alm(s, "lambda_rsi")
    seed = _number(s, "seed", int, 0)
    result = outlier_sweep(spec, fractions, trials, cfg_lrr, cfg_rsi, seed,
                           rank_tol=_rank_tol(s, THRESHOLDED_RANK_TOL))
    out = _output_dir(s)
    write_sweep_csv(out, result)
    if getattr(args, "plot", False):
        plot_sweep(out / "sweep.svg", result)
    for r in result.summary:
        print(f"{r.fraction:5.2f}  {r.method}  mean {r.mean:.4f}  std {r.std:.4f}")
    return EXIT_OK


def cmd_hopkins(args):
    s = _settings(args, _SWEEP_KEYS + ("input", "lambda"))
    root = _require(s, "input")
    result = hopkins_benchmark(root, _alm(s, "lambda_lrr"), _alm(s, "lambda_rsi"),
                               _number(s, "seed", int, 0))
    if not result.names:
        raise FileNotFoundError(f"no sequences found under {root}")
    out = _output_dir(s)
    lines = ["sequence,method,error"]
    for i, name in enumerate(result.names):
        lines += [f"{name},{m},{_fmt(result.errors[m][i])}" for m in METHODS]
    (out / "hopkins.csv").write_text("\n".join(lines) + "\n")
    for m in METHODS:
        print(f"{m}: mean error {100 * result.mean_error(m):.4f}%  "
              f"median {100 * result.median_error(m):.4f}%  over {len(result.names)} sequences")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "cluster": cmd_cluster,
    "denoise": cmd_denoise,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "hopkins": cmd_hopkins,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        threads = int(os.environ["SUBSEG_THREADS"]) if os.environ.get("SUBSEG_THREADS") else 0
        limit = threadpool_limits(limits=resolve_workers(threads)) if threads else nullcontext()
        with limit:
            return COMMANDS[args.command](args)
    except (InvalidInputError, SubsegError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
