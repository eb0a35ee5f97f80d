import numpy as np
import pytest


def subspace_data(rng, dims, counts, ambient):
    """Clean samples from independent random subspaces, grouped by subspace."""
    blocks, labels = [], []
    for i, (r, d) in enumerate(zip(dims, counts)):
        B, _ = np.linalg.qr(rng.standard_normal((ambient, r)))
        blocks.append(B @ rng.standard_normal((r, d)))
        labels += [i] * d
    return np.hstack(blocks), np.array(labels)


def low_rank(rng, m, n, r):
    return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20101010)


ACCEPTANCE = []


def record(criterion, ok, detail):
    """Log a criterion outcome; `ok` is a bool, or None for skipped, or "INFO"."""
    ACCEPTANCE.append((criterion, ok if ok is None or isinstance(ok, str) else bool(ok), detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(ACCEPTANCE, key=lambda x: x[0]):
        if isinstance(ok, str):
            status = ok
        else:
            status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        terminalreporter.write_line(f"[{status}] {criterion}: {detail}")
