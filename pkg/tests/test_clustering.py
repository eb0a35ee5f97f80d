import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subseg.clustering import (affinity_lrr, affinity_rsi, segmentation_accuracy,
                               spectral_cluster, spectral_embedding)
from subseg.errors import InvalidInputError
from subseg.linalg import sim
from subseg.synthgen import SyntheticSpec, generate


def brute_force_accuracy(pred, truth):
    """Oracle: try every injective relabeling of the predicted clusters."""
    pvals, tvals = np.unique(pred), np.unique(truth)
    targets = list(tvals) + [None] * max(0, len(pvals) - len(tvals))
    best = 0
    for perm in itertools.permutations(targets, len(pvals)):
        mapping = dict(zip(pvals, perm))
        best = max(best, sum(mapping[p] == t for p, t in zip(pred, truth)))
    return best / len(pred)


def block_affinity(rng, sizes):
    n = sum(sizes)
    W = np.zeros((n, n))
    start = 0
    for s in sizes:
        B = rng.uniform(0.1, 1.0, (s, s))
        W[start:start + s, start:start + s] = B + B.T
        start += s
    return W, np.repeat(np.arange(len(sizes)), sizes)


def test_affinity_lrr_examples():
    np.testing.assert_array_equal(affinity_lrr(np.zeros((3, 3))), np.zeros((3, 3)))
    np.testing.assert_array_equal(affinity_lrr([[1, -2], [0, 3]]), [[2, 2], [2, 6]])
    Z = np.array([[1.0, -0.5], [-0.5, 2.0]])
    np.testing.assert_array_equal(affinity_lrr(Z), 2 * np.abs(Z))


def test_affinity_rsi_examples():
    np.testing.assert_array_equal(affinity_rsi(np.eye(4)), np.eye(4))
    np.testing.assert_array_equal(affinity_rsi([[0.5, -0.5], [-0.5, 0.5]]), np.full((2, 2), 0.5))


def test_affinity_rsi_block_diagonal_on_clean_data(rng):
    spec = SyntheticSpec(k=2, subspace_dim=3, ambient_dim=20, points_per_subspace=8,
                         noise_variance_factor=0.0, seed=1)
    X, gt = generate(spec)
    W = affinity_rsi(sim(X))
    off = gt.labels[:, None] != gt.labels[None, :]
    assert np.max(W[off]) <= 1e-8


def test_affinity_rsi_rejects_asymmetric():
    with pytest.raises(InvalidInputError):
        affinity_rsi([[1.0, 0.5], [0.0, 1.0]])


def test_affinity_rsi_symmetrizes_within_tolerance():
    W = affinity_rsi([[1.0, 0.5 + 1e-8], [0.5, 1.0]])
    assert W[0, 1] == W[1, 0]


def test_affinity_rejects_non_square():
    with pytest.raises(InvalidInputError):
        affinity_lrr(np.zeros((2, 3)))


@pytest.mark.parametrize("sizes", [[5, 7], [3, 4, 5], [6, 2, 4, 3, 5]])
def test_spectral_block_diagonal_is_exact(rng, sizes):
    W, truth = block_affinity(rng, sizes)
    for seed in range(5):
        labels = spectral_cluster(W, len(sizes), seed)
        assert segmentation_accuracy(labels, truth) == 1.0


def test_spectral_identity_each_point_alone():
    labels = spectral_cluster(np.eye(6), 6, seed=3)
    assert sorted(labels) == list(range(6))


def test_spectral_single_cluster():
    np.testing.assert_array_equal(spectral_cluster(np.ones((4, 4)), 1), np.zeros(4))


def test_spectral_clean_benchmark_data_is_perfect():
    spec = SyntheticSpec(noise_variance_factor=0.0, seed=7)
    X, gt = generate(spec)
    labels = spectral_cluster(affinity_rsi(sim(X)), 5, seed=0)
    assert segmentation_accuracy(labels, gt.labels) == 1.0


def test_spectral_deterministic(rng):
    W = np.abs(rng.standard_normal((30, 30)))
    W = W + W.T
    a = spectral_cluster(W, 3, seed=11)
    b = spectral_cluster(W, 3, seed=11)
    np.testing.assert_array_equal(a, b)


def test_spectral_handles_isolated_nodes(rng):
    W, truth = block_affinity(rng, [4, 4])
    W = np.pad(W, ((0, 1), (0, 1)))
    emb = spectral_embedding(W, 3)
    assert np.all(np.isfinite(emb))
    labels = spectral_cluster(W, 3, seed=0)
    assert len(set(labels[:4])) == 1 and len(set(labels[4:8])) == 1
    assert len(set(labels)) == 3


@pytest.mark.parametrize("k", [0, 5])
def test_spectral_rejects_bad_k(k):
    with pytest.raises(InvalidInputError):
        spectral_cluster(np.eye(4), k)


def test_accuracy_examples():
    truth = np.array([0, 0, 1, 1, 2, 2])
    assert segmentation_accuracy(truth, truth) == 1.0
    assert segmentation_accuracy(np.array([2, 2, 0, 0, 1, 1]), truth) == 1.0
    assert segmentation_accuracy([0, 1, 1, 1], [0, 0, 1, 1]) == brute_force_accuracy(
        [0, 1, 1, 1], [0, 0, 1, 1]) == 0.75


def test_accuracy_length_mismatch():
    with pytest.raises(InvalidInputError):
        segmentation_accuracy([0, 1], [0, 1, 1])


def test_accuracy_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(200):
        k = int(rng.integers(1, 7))
        n = int(rng.integers(1, 25))
        pred = rng.integers(0, k, n)
        truth = rng.integers(0, k, n)
        assert segmentation_accuracy(pred, truth) == brute_force_accuracy(pred, truth)


labelings = st.integers(1, 30).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 4), min_size=n, max_size=n),
                        st.lists(st.integers(0, 4), min_size=n, max_size=n),
                        st.permutations(range(5))))


@settings(max_examples=200, deadline=None)
@given(labelings)
def test_accuracy_invariances(case):
    pred, truth, perm = case
    pred, truth = np.array(pred), np.array(truth)
    acc = segmentation_accuracy(pred, truth)
    assert 0.0 <= acc <= 1.0
    assert segmentation_accuracy(np.array(perm)[pred], truth) == acc
    assert segmentation_accuracy(truth, pred) == acc
