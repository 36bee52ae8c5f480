"""
Metric tests: accuracy under the best label matching, connectivity,
subspace preservation and connection counts.
"""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssc.errors import LengthMismatchError
from ssc.metrics import (
    EvalReport,
    clustering_accuracy,
    connection_histogram,
    connection_summary,
    connectivity,
    subspace_preserving_rate,
)


def _brute_force_accuracy(truth, pred, n_labels):
    best = 0
    for perm in itertools.permutations(range(n_labels)):
        mapped = [perm[p] for p in pred]
        best = max(best, sum(int(a == b) for a, b in zip(mapped, truth)))
    return 100.0 * best / len(truth)


@pytest.mark.parametrize('truth, pred, expected', [
    ([0, 0, 1, 1], [1, 1, 0, 0], 100.0),
    ([0, 0, 1, 1], [0, 1, 0, 1], 50.0),
    ([0, 0, 0], [0, 1, 2], pytest.approx(100.0 / 3.0)),
    ([], [], 100.0),
])
def test_accuracy_examples(truth, pred, expected):
    assert clustering_accuracy(truth, pred) == expected


def test_accuracy_length_mismatch():
    with pytest.raises(LengthMismatchError):
        clustering_accuracy([0, 1], [0])


def test_accuracy_matches_brute_force_exhaustively():
    for n in range(1, 5):
        for truth in itertools.product(range(3), repeat=n):
            for pred in itertools.product(range(3), repeat=n):
                assert clustering_accuracy(truth, pred) == pytest.approx(
                    _brute_force_accuracy(truth, pred, 3)
                )


labelings = st.integers(1, 8).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 3), min_size=n, max_size=n),
                        st.lists(st.integers(0, 3), min_size=n, max_size=n))
)


@settings(max_examples=300, deadline=None)
@given(labelings)
def test_accuracy_matches_brute_force(pair):
    truth, pred = pair
    assert clustering_accuracy(truth, pred) == pytest.approx(_brute_force_accuracy(truth, pred, 4))


@settings(max_examples=100, deadline=None)
@given(labelings, st.permutations([0, 1, 2, 3]))
def test_accuracy_ignores_label_names(pair, perm):
    truth, pred = pair
    renamed = [perm[p] for p in pred]
    assert clustering_accuracy(truth, renamed) == pytest.approx(clustering_accuracy(truth, pred))
    assert clustering_accuracy(truth, truth) == 100.0


def _complete(n):
    return np.ones((n, n)) - np.eye(n)


def test_connectivity_of_triangles():
    w = np.zeros((6, 6))
    w[:3, :3] = _complete(3)
    w[3:, 3:] = _complete(3)
    assert connectivity(w, [0, 0, 0, 1, 1, 1]) == pytest.approx(1.5)


def test_connectivity_of_edges():
    w = np.zeros((4, 4))
    w[:2, :2] = _complete(2)
    w[2:, 2:] = _complete(2)
    assert connectivity(w, [0, 0, 1, 1]) == pytest.approx(2.0)


def test_disconnected_cluster_has_zero_connectivity():
    w = np.zeros((6, 6))
    w[:3, :3] = _complete(3)
    w[3, 4] = w[4, 3] = 1.0  # point 5 is cut off from its cluster
    assert connectivity(w, [0, 0, 0, 1, 1, 1]) == 0.0


def test_singleton_cluster_has_zero_connectivity():
    w = np.zeros((3, 3))
    w[:2, :2] = _complete(2)
    assert connectivity(w, [0, 0, 1]) == 0.0


def test_connectivity_length_mismatch():
    with pytest.raises(LengthMismatchError):
        connectivity(_complete(3), [0, 0])


def test_subspace_preserving_rate():
    truth = [0, 0, 1]
    assert subspace_preserving_rate(np.array([[0.0, 1.0, 0.0],
                                              [1.0, 0.0, 0.0],
                                              [0.0, 0.0, 0.0]]), truth) == 1.0
    assert subspace_preserving_rate(np.array([[0.0, 0.0, 0.0],
                                              [0.0, 0.0, 0.0],
                                              [1.0, -2.0, 0.0]]), truth) == 0.0
    mixed = np.zeros((3, 3))
    mixed[1, 0] = 0.3
    mixed[2, 0] = -0.1
    assert subspace_preserving_rate(mixed, truth) == pytest.approx(0.75)


def test_subspace_preserving_rate_of_empty_matrix():
    assert subspace_preserving_rate(np.zeros((3, 3)), [0, 1, 1]) == 1.0


def test_connection_histogram():
    c = np.zeros((4, 4))
    c[1, 2] = 0.5
    assert list(connection_histogram(c)) == [0, 1, 1, 0]
    assert connection_histogram(np.zeros((3, 3))).sum() == 0


def test_connection_histogram_counts_both_directions():
    rng = np.random.default_rng(0)
    k, n = 3, 12
    c = np.zeros((n, n))
    for i in range(n):
        others = [j for j in range(n) if j != i]
        c[rng.choice(others, size=k, replace=False), i] = rng.uniform(0.1, 1.0, size=k)
    assert connection_histogram(c).sum() == 2 * n * k
    summary = connection_summary(c)
    assert summary['total'] == 2 * n * k
    assert summary['mean'] == pytest.approx(2.0 * k)
    assert summary['min'] >= k


def test_report_as_dict():
    report = EvalReport(99.5, 0.2, 0.98, 1, 0, 0.1, 0.2)
    assert report.to_dict()['accuracy_pct'] == 99.5
