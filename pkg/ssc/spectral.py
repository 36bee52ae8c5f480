"""
Affinity construction and normalized spectral clustering.
"""
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import sparse

from ssc import config
from ssc.coders.utils import CoefficientMatrix
from ssc.numerics import kmeans, sym_eigs

logger = logging.getLogger(__name__)


@dataclass
class AffinityMatrix:
    """Symmetric nonnegative N x N weights with zero diagonal."""
    W: np.ndarray

    @property
    def n_points(self) -> int:
        return self.W.shape[0]

    def degrees(self) -> np.ndarray:
        return self.W.sum(axis=1)

    def isolated_count(self) -> int:
        """Vertices with no incident weight."""
        return int(np.count_nonzero(self.degrees() == 0))


def _dense(c) -> np.ndarray:
    if isinstance(c, CoefficientMatrix):
        return c.toarray()
    if sparse.issparse(c):
        return c.toarray()
    return np.asarray(c, dtype=float)


def build_affinity(c: Union[CoefficientMatrix, np.ndarray]) -> AffinityMatrix:
    """W = |C| + |C|^T."""
    a = np.abs(_dense(c))
    w = a + a.T
    np.fill_diagonal(w, 0.0)
    return AffinityMatrix(W=w)


def normalized_laplacian(w: Union[AffinityMatrix, np.ndarray]) -> np.ndarray:
    """
    L = I - D^{-1/2} W D^{-1/2}.

    Isolated vertices (degree 0) get a zero row/column in D^{-1/2}.
    """
    w = w.W if isinstance(w, AffinityMatrix) else np.asarray(w, dtype=float)
    degrees = w.sum(axis=1)
    inv_sqrt = np.zeros_like(degrees)
    connected = degrees > 0
    inv_sqrt[connected] = 1.0 / np.sqrt(degrees[connected])
    lap = np.eye(w.shape[0]) - inv_sqrt[:, None] * w * inv_sqrt[None, :]
    return (lap + lap.T) / 2.0


def spectral_embedding(w: AffinityMatrix, n_clusters: int) -> np.ndarray:
    """Rows of the n_clusters bottom Laplacian eigenvectors, scaled to unit norm (zero rows kept)."""
    eig = sym_eigs(normalized_laplacian(w), n_clusters)
    rows = eig.vectors
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    return np.divide(rows, norms, out=np.zeros_like(rows), where=norms > 0)


def spectral_cluster(w: AffinityMatrix, n_clusters: int, seed: int,
                     restarts: int = config.KMEANS_RESTARTS) -> np.ndarray:
    """
    Normalized spectral clustering (symmetric Laplacian, row-normalized embedding).

    Args:
        w: AffinityMatrix
        n_clusters: number of clusters, >= 1
        seed: k-means seed
        restarts: k-means restarts

    Returns:
        length-N label array
    """
    if not isinstance(w, AffinityMatrix):
        w = AffinityMatrix(W=np.asarray(w, dtype=float))

    isolated = w.isolated_count()
    if isolated:
        logger.warning(f"Affinity has {isolated} isolated vertices")

    embedding = spectral_embedding(w, n_clusters)
    return kmeans(embedding, n_clusters, seed, restarts=restarts, max_iter=config.KMEANS_MAX_ITER)
