"""
Numerical kernel tests: least-squares projection, eigensolver, k-means.
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssc.errors import DimensionInvalidError, NotSymmetricError
from ssc.numerics import kmeans, kmeans_fit, lstsq_project, sym_eigs


def test_project_onto_axis():
    x = np.array([1.0, 1.0]) / np.sqrt(2.0)
    coeffs, residual = lstsq_project(x, np.array([[1.0], [0.0]]))
    assert np.allclose(coeffs, [1.0 / np.sqrt(2.0)])
    assert np.allclose(residual, [0.0, 1.0 / np.sqrt(2.0)])


def test_vector_in_span_has_no_residual():
    rng = np.random.default_rng(0)
    basis = rng.standard_normal((10, 3))
    x = basis @ np.array([0.5, -1.0, 2.0])
    coeffs, residual = lstsq_project(x, basis)
    assert np.linalg.norm(residual) < 1e-9
    assert np.allclose(coeffs, [0.5, -1.0, 2.0])


def test_duplicate_columns_take_minimum_norm_solution():
    basis = np.array([[1.0, 1.0], [0.0, 0.0]])
    coeffs, residual = lstsq_project(np.array([1.0, 0.0]), basis)
    assert np.linalg.norm(residual) < 1e-12
    assert np.isclose(coeffs.sum(), 1.0)
    assert np.allclose(coeffs, [0.5, 0.5])


def test_more_columns_than_rows():
    rng = np.random.default_rng(3)
    basis = rng.standard_normal((3, 5))
    x = rng.standard_normal(3)
    coeffs, residual = lstsq_project(x, basis)
    assert coeffs.shape == (5,)
    assert np.linalg.norm(residual) < 1e-9


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), dim=st.integers(2, 30), cols=st.integers(1, 8))
def test_residual_is_orthogonal_to_basis(seed, dim, cols):
    rng = np.random.default_rng(seed)
    basis = rng.standard_normal((dim, cols))
    x = rng.standard_normal(dim)
    _, residual = lstsq_project(x, basis)
    assert np.max(np.abs(basis.T @ residual)) < 1e-8 * max(1.0, np.linalg.norm(x))


def test_residual_orthogonality_many_instances():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        cols = int(rng.integers(1, 11))
        basis = rng.standard_normal((20, cols))
        x = rng.standard_normal(20)
        _, residual = lstsq_project(x, basis)
        assert np.max(np.abs(basis.T @ residual)) < 1e-8


def test_eigs_of_identity():
    result = sym_eigs(np.eye(3), 3)
    assert np.allclose(result.values, [1.0, 1.0, 1.0])
    assert np.allclose(result.vectors.T @ result.vectors, np.eye(3))


def test_smallest_eigs_of_diagonal():
    result = sym_eigs(np.diag([3.0, 1.0, 2.0]), 2)
    assert np.allclose(result.values, [1.0, 2.0])
    assert np.allclose(np.abs(result.vectors[:, 0]), [0.0, 1.0, 0.0])
    assert np.allclose(np.abs(result.vectors[:, 1]), [0.0, 0.0, 1.0])


def test_eigs_of_two_by_two():
    result = sym_eigs(np.array([[2.0, 1.0], [1.0, 2.0]]), 2)
    assert np.allclose(result.values, [1.0, 3.0])
    # sign convention: largest-magnitude entry of each vector is positive
    for column in result.vectors.T:
        assert column[np.argmax(np.abs(column))] > 0


def test_eigs_reconstruct_matrix():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((8, 8))
    a = a + a.T
    result = sym_eigs(a, 8)
    rebuilt = result.vectors @ np.diag(result.values) @ result.vectors.T
    assert np.max(np.abs(rebuilt - a)) < 1e-7
    assert np.all(np.diff(result.values) >= 0)


def test_asymmetric_matrix_rejected():
    with pytest.raises(NotSymmetricError):
        sym_eigs(np.array([[1.0, 2.0], [0.0, 1.0]]), 1)


@pytest.mark.parametrize('m', [0, 4])
def test_eig_count_out_of_range(m):
    with pytest.raises(DimensionInvalidError):
        sym_eigs(np.eye(3), m)


def _two_blobs(rng, n_left=15, n_right=20):
    left = rng.normal(0.0, 0.1, size=(n_left, 2))
    right = rng.normal(0.0, 0.1, size=(n_right, 2)) + np.array([10.0, 0.0])
    return np.vstack([left, right])


def test_kmeans_separates_far_blobs():
    rng = np.random.default_rng(1)
    rows = _two_blobs(rng)
    labels = kmeans(rows, 2, seed=0)
    assert len(set(labels[:15])) == 1
    assert len(set(labels[15:])) == 1
    assert labels[0] != labels[15]


def test_kmeans_single_cluster():
    rows = np.random.default_rng(2).standard_normal((12, 3))
    assert set(kmeans(rows, 1, seed=0)) == {0}


def test_kmeans_one_point_per_cluster():
    rows = np.random.default_rng(3).standard_normal((7, 2))
    result = kmeans_fit(rows, 7, seed=0)
    assert len(set(result.labels)) == 7
    assert result.inertia == pytest.approx(0.0, abs=1e-12)


def test_kmeans_is_deterministic():
    rows = np.random.default_rng(4).standard_normal((40, 3))
    first = kmeans(rows, 4, seed=9)
    second = kmeans(rows, 4, seed=9)
    assert np.array_equal(first, second)


def test_kmeans_threads_do_not_change_result():
    rows = np.random.default_rng(6).standard_normal((40, 3))
    serial = kmeans_fit(rows, 3, seed=2, workers=1)
    threaded = kmeans_fit(rows, 3, seed=2, workers=4)
    assert np.array_equal(serial.labels, threaded.labels)
    assert serial.restart == threaded.restart


@pytest.mark.parametrize('seed', range(5))
def test_kmeans_objective_never_increases(seed):
    rows = np.random.default_rng(seed).standard_normal((60, 4))
    history = kmeans_fit(rows, 5, seed=seed, restarts=1).history
    assert history
    for before, after in zip(history, history[1:]):
        assert after <= before + 1e-12 * max(1.0, before)


def test_kmeans_rejects_bad_k():
    with pytest.raises(DimensionInvalidError):
        kmeans(np.zeros((3, 2)), 4, seed=0)
