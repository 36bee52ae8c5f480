"""
Evaluation metrics: clustering accuracy, per-cluster connectivity and
connection / subspace-preservation diagnostics of a coefficient matrix.
"""
import logging
from dataclasses import asdict, dataclass
from typing import Dict, Union

import numpy as np
from scipy import sparse
from scipy.optimize import linear_sum_assignment
from scipy.sparse.csgraph import connected_components

from ssc.coders.utils import CoefficientMatrix
from ssc.errors import LengthMismatchError
from ssc.numerics import sym_eigs
from ssc.spectral import AffinityMatrix, normalized_laplacian

logger = logging.getLogger(__name__)


@dataclass
class EvalReport:
    """Outcome of one clustering run."""
    accuracy_pct: float
    connectivity: float
    subspace_preserving_rate: float
    fallback_count: int
    isolated_count: int
    elapsed_coding_s: float
    elapsed_spectral_s: float

    def to_dict(self) -> Dict:
        return asdict(self)


def _labels(values) -> np.ndarray:
    return np.asarray(values).ravel()


def _check_lengths(truth: np.ndarray, n: int, what: str = 'prediction'):
    if len(truth) != n:
        raise LengthMismatchError(f"{len(truth)} ground-truth labels vs {n} in {what}")


def _csc(c: Union[CoefficientMatrix, np.ndarray]) -> sparse.csc_matrix:
    if isinstance(c, CoefficientMatrix):
        return c.matrix
    matrix = sparse.csc_matrix(c)
    matrix.eliminate_zeros()
    return matrix


def clustering_accuracy(truth, pred) -> float:
    """
    Percentage of points matched under the best cluster-to-class assignment.

    The assignment maximizes matched points over the confusion matrix
    (Hungarian method via scipy's linear_sum_assignment).
    """
    truth, pred = _labels(truth), _labels(pred)
    _check_lengths(truth, len(pred))
    if len(truth) == 0:
        return 100.0

    classes, truth_idx = np.unique(truth, return_inverse=True)
    clusters, pred_idx = np.unique(pred, return_inverse=True)
    confusion = np.zeros((len(clusters), len(classes)), dtype=int)
    np.add.at(confusion, (pred_idx, truth_idx), 1)

    rows, cols = linear_sum_assignment(confusion, maximize=True)
    matched = confusion[rows, cols].sum()
    return 100.0 * matched / len(truth)


def connectivity(w: Union[AffinityMatrix, np.ndarray], truth) -> float:
    """
    Minimum over ground-truth clusters of the second-smallest eigenvalue of the
    cluster subgraph's normalized Laplacian (0 for trivial or disconnected clusters).
    """
    w = w.W if isinstance(w, AffinityMatrix) else np.asarray(w, dtype=float)
    truth = _labels(truth)
    _check_lengths(truth, w.shape[0], 'affinity')

    worst = np.inf
    for label in np.unique(truth):
        members = np.flatnonzero(truth == label)
        if len(members) < 2:
            return 0.0
        sub = w[np.ix_(members, members)]
        n_components, _ = connected_components(sparse.csr_matrix(sub), directed=False)
        if n_components > 1:
            return 0.0
        lam2 = sym_eigs(normalized_laplacian(sub), 2).values[1]
        worst = min(worst, max(float(lam2), 0.0))

    return float(worst) if np.isfinite(worst) else 0.0


def subspace_preserving_rate(c: Union[CoefficientMatrix, np.ndarray], truth) -> float:
    """
    Mean over columns with nonzero mass of the l1 share on same-label entries.
    1.0 means no wrong connections.
    """
    matrix = _csc(c)
    truth = _labels(truth)
    _check_lengths(truth, matrix.shape[1], 'coefficient matrix')

    shares = []
    for i in range(matrix.shape[1]):
        start, end = matrix.indptr[i], matrix.indptr[i + 1]
        rows = matrix.indices[start:end]
        mass = np.abs(matrix.data[start:end])
        total = mass.sum()
        if total <= 0:
            continue
        shares.append(mass[truth[rows] == truth[i]].sum() / total)

    if not shares:
        return 1.0
    return float(np.mean(shares))


def connection_histogram(c: Union[CoefficientMatrix, np.ndarray]) -> np.ndarray:
    """con_i = nonzeros in column i (chosen neighbors) + nonzeros in row i (times chosen)."""
    matrix = _csc(c)
    outgoing = np.diff(matrix.indptr)
    incoming = np.bincount(matrix.indices, minlength=matrix.shape[0])
    return (outgoing + incoming).astype(int)


def connection_summary(c: Union[CoefficientMatrix, np.ndarray]) -> Dict[str, float]:
    """Spread of the con histogram: how evenly connections are shared."""
    con = connection_histogram(c)
    return {
        'total': int(con.sum()),
        'min': int(con.min()) if con.size else 0,
        'max': int(con.max()) if con.size else 0,
        'mean': float(con.mean()) if con.size else 0.0,
        'std': float(con.std()) if con.size else 0.0,
    }
