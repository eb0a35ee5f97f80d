"""Matrix, label and config files.

Dense CSV files hold one feature per row and one sample per column, with no
header. Files ending in ``.mtx`` are read and written as Matrix Market.
"""

import json
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from .errors import InvalidInputError

HOPKINS_MATRIX = "X.csv"
HOPKINS_LABELS = "labels.csv"


def _is_mtx(path):
    return Path(path).suffix.lower() == ".mtx"


def read_matrix(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        if _is_mtx(path):
            A = scipy.io.mmread(str(path))
            A = A.toarray() if scipy.sparse.issparse(A) else np.asarray(A)
        else:
            A = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise InvalidInputError(f"{path}: malformed matrix ({exc})") from exc
    if A.size == 0:
        raise InvalidInputError(f"{path}: empty matrix")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{path}: non-finite entries")
    return np.asarray(A, dtype=np.float64)


def write_matrix(path, A):
    """Write `A` losslessly (17 significant digits)."""
    path = Path(path)
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    if _is_mtx(path):
        scipy.io.mmwrite(str(path), A, precision=17)
    else:
        np.savetxt(path, A, fmt="%.17g", delimiter=",")


def read_labels(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        raw = np.loadtxt(path, delimiter=",", ndmin=1, dtype=np.float64)
    except ValueError as exc:
        raise InvalidInputError(f"{path}: malformed labels ({exc})") from exc
    raw = raw.ravel()
    if raw.size == 0:
        raise InvalidInputError(f"{path}: no labels")
    if not np.all(np.isfinite(raw)) or np.any(raw != np.round(raw)):
        raise InvalidInputError(f"{path}: labels must be integers")
    return raw.astype(np.int64)


def write_labels(path, labels):
    np.savetxt(Path(path), np.asarray(labels, dtype=np.int64).reshape(-1, 1), fmt="%d")


def read_config(path):
    """Load a JSON object of key/value settings."""
    path = Path(path)
    text = path.read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(cfg, dict):
        raise InvalidInputError(f"{path}: expected a JSON object")
    return cfg


def load_hopkins_sequence(directory):
    """Read one preprocessed motion sequence.

    The directory must contain ``X.csv`` (stacked image coordinates, one
    column per tracked point) and ``labels.csv`` (one motion id per point).
    Conversion from the original ``*_truth.mat`` files, including any
    projection or normalization, is expected to have been done already.

    Raises
    ------
    FileNotFoundError
        If the directory does not exist or is empty.
    InvalidInputError
        If a file is missing, ragged or the label count does not match.
    """
    directory = Path(directory)
    if not directory.is_dir() or not any(directory.iterdir()):
        raise FileNotFoundError(f"no sequence data in {directory}")
    for name in (HOPKINS_MATRIX, HOPKINS_LABELS):
        if not (directory / name).is_file():
            raise InvalidInputError(f"{directory}: missing {name}")
    X = read_matrix(directory / HOPKINS_MATRIX)
    labels = read_labels(directory / HOPKINS_LABELS)
    if labels.size != X.shape[1]:
        raise InvalidInputError(
            f"{directory}: {labels.size} labels for {X.shape[1]} tracked points")
    return X, labels


def write_hopkins_sequence(directory, X, labels):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_matrix(directory / HOPKINS_MATRIX, X)
    write_labels(directory / HOPKINS_LABELS, labels)


def find_hopkins_sequences(root):
    """Subdirectories of `root` that contain a sequence, sorted by name."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"no such directory: {root}")
    return sorted(p for p in root.iterdir() if p.is_dir() and (p / HOPKINS_MATRIX).is_file())
