"""
Numerical kernels shared by the coders and the spectral stage:
least-squares projection, symmetric eigensolver and seeded k-means.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
import scipy.linalg

from ssc.errors import DimensionInvalidError, NotSymmetricError

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10  # Relative pivot magnitude below which QR is treated as rank deficient
SYMMETRY_TOL = 1e-9


@dataclass
class EigenResult:
    """Ascending eigenvalues with orthonormal eigenvectors in matching columns."""
    values: np.ndarray
    vectors: np.ndarray


@dataclass
class KMeansResult:
    """Outcome of the best k-means restart."""
    labels: np.ndarray
    inertia: float
    restart: int
    history: List[float] = field(default_factory=list)


def lstsq_project(x: np.ndarray, basis: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Project x onto the span of the basis columns.

    Uses a column-pivoted QR; when the pivots reveal rank deficiency the
    minimum-norm least-squares solution is taken instead.

    Args:
        x: D-vector
        basis: D x s matrix, s >= 1

    Returns:
        (coeffs, residual) with residual = x - basis @ coeffs
    """
    basis = np.asarray(basis, dtype=float)
    if basis.ndim == 1:
        basis = basis[:, None]
    x = np.asarray(x, dtype=float)
    n_cols = basis.shape[1]

    q, r, perm = scipy.linalg.qr(basis, mode='economic', pivoting=True)
    pivots = np.abs(np.diag(r))
    full_rank = (
        r.shape[0] >= n_cols
        and pivots[0] > 0
        and pivots[-1] > RANK_TOL * pivots[0]
    )

    if full_rank:
        z = scipy.linalg.solve_triangular(r, q.T @ x)
        coeffs = np.empty(n_cols)
        coeffs[perm] = z
    else:
        coeffs = scipy.linalg.lstsq(basis, x, cond=RANK_TOL)[0]

    residual = x - basis @ coeffs
    return coeffs, residual


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so that its largest-magnitude entry is positive."""
    if vectors.size == 0:
        return vectors
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sym_eigs(a: np.ndarray, m: int) -> EigenResult:
    """
    Return the m algebraically smallest eigenpairs of a symmetric matrix.

    Eigenvector signs are fixed (largest-magnitude entry positive) so that
    results are reproducible across runs.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionInvalidError(f"Expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if not 1 <= m <= n:
        raise DimensionInvalidError(f"Requested {m} eigenpairs of a {n}x{n} matrix")

    asymmetry = np.max(np.abs(a - a.T)) if n else 0.0
    if asymmetry > SYMMETRY_TOL:
        raise NotSymmetricError(f"Matrix asymmetry {asymmetry:.3e} exceeds {SYMMETRY_TOL}")

    sym = (a + a.T) / 2.0
    values, vectors = scipy.linalg.eigh(sym, subset_by_index=[0, m - 1])
    return EigenResult(values=values, vectors=_fix_signs(vectors))


def _squared_distances(rows: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, rows x centers."""
    row_sq = np.sum(rows * rows, axis=1, keepdims=True)
    center_sq = np.sum(centers * centers, axis=1, keepdims=True).T
    dist = row_sq - 2.0 * rows @ centers.T + center_sq
    np.maximum(dist, 0, out=dist)
    return dist


def _kmeans_plus_plus(rows: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding; returns the chosen row indices."""
    n = rows.shape[0]
    chosen = [int(rng.integers(n))]
    closest = _squared_distances(rows, rows[chosen])[:, 0]

    while len(chosen) < k:
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            # All remaining rows coincide with a center
            remaining = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(remaining))
        chosen.append(idx)
        closest = np.minimum(closest, _squared_distances(rows, rows[[idx]])[:, 0])

    return np.array(chosen)


def _lloyd(rows: np.ndarray, centers: np.ndarray, max_iter: int) -> Tuple[np.ndarray, float, List[float]]:
    """Lloyd iterations until the assignment stops changing or max_iter is reached."""
    labels = None
    history: List[float] = []

    for _ in range(max_iter):
        new_labels = np.argmin(_squared_distances(rows, centers), axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels

        for c in range(centers.shape[0]):
            members = rows[labels == c]
            if len(members):  # empty clusters keep their previous center
                centers[c] = members.mean(axis=0)

        inertia = float(np.sum((rows - centers[labels]) ** 2))
        history.append(inertia)

    return labels, history[-1], history


def kmeans_fit(rows: np.ndarray, k: int, seed: int, restarts: int = 10,
               max_iter: int = 300, workers: int = 1) -> KMeansResult:
    """
    Seeded k-means with k-means++ initialization and several restarts.

    Each restart draws from its own child of SeedSequence(seed), so the result
    does not depend on the order in which restarts run. The restart with the
    smallest within-cluster sum of squares wins; ties go to the lower restart index.

    Args:
        rows: N x m matrix
        k: cluster count, 1 <= k <= N
        seed: integer seed
        restarts: number of independent initializations
        max_iter: Lloyd iteration cap per restart
        workers: threads used to run restarts

    Returns:
        KMeansResult of the winning restart, including its objective history
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim == 1:
        rows = rows[:, None]
    n = rows.shape[0]
    if not 1 <= k <= n:
        raise DimensionInvalidError(f"k={k} must lie in [1, {n}]")
    if restarts < 1:
        raise DimensionInvalidError(f"restarts={restarts} must be >= 1")

    seeds = np.random.SeedSequence(seed).spawn(restarts)

    def run(restart: int) -> KMeansResult:
        rng = np.random.default_rng(seeds[restart])
        centers = rows[_kmeans_plus_plus(rows, k, rng)].copy()
        labels, inertia, history = _lloyd(rows, centers, max_iter)
        return KMeansResult(labels=labels, inertia=inertia, restart=restart, history=history)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(restarts)))
    else:
        results = [run(r) for r in range(restarts)]

    best = min(results, key=lambda res: (res.inertia, res.restart))
    logger.debug(f"k-means: best restart {best.restart} with inertia {best.inertia:.6g}")
    return best


def kmeans(rows: np.ndarray, k: int, seed: int, restarts: int = 10, max_iter: int = 300) -> np.ndarray:
    """Labels of the best k-means restart (see kmeans_fit)."""
    return kmeans_fit(rows, k, seed, restarts=restarts, max_iter=max_iter).labels
