"""
Greedy pursuit primitives shared by the OMP and RCOMP coders.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np
from scipy import sparse

from ssc.errors import DatasetTooSmallError, NoCandidateError
from ssc.numerics import lstsq_project

logger = logging.getLogger(__name__)


@dataclass
class PointCode:
    """Result of coding one point: support in selection order and its coefficients."""
    support: List[int] = field(default_factory=list)
    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    residual_norms: List[float] = field(default_factory=list)


@dataclass
class CoefficientMatrix:
    """
    N x N sparse self-expression matrix C; column i holds c_i.

    Attributes:
        matrix: scipy.sparse CSC matrix
        supports: per-column support in selection order
        k: neighbor cap used by the coder
    """
    matrix: sparse.csc_matrix
    supports: List[List[int]]
    k: int

    @property
    def n_points(self) -> int:
        return self.matrix.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.matrix[:, i].toarray().ravel()

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    @classmethod
    def from_codes(cls, codes: Sequence[PointCode], k: int) -> 'CoefficientMatrix':
        """Assemble C from per-point codes (column i from codes[i])."""
        n = len(codes)
        rows, cols, vals = [], [], []
        for i, code in enumerate(codes):
            rows.extend(code.support)
            cols.extend([i] * len(code.support))
            vals.extend(np.asarray(code.coeffs).tolist())
        matrix = sparse.csc_matrix((vals, (rows, cols)), shape=(n, n))
        matrix.eliminate_zeros()
        return cls(matrix=matrix, supports=[list(c.support) for c in codes], k=k)


def select_neighbor(dots: np.ndarray, exclude: Iterable[int]) -> int:
    """
    Index of the largest score outside the excluded set.

    Ties go to the smallest index.

    Raises:
        NoCandidateError: if every remaining score is 0
    """
    masked = np.array(dots, dtype=float, copy=True)
    excluded = list(exclude)
    if excluded:
        masked[excluded] = 0.0
    j = int(np.argmax(masked))
    if masked[j] <= 0.0:
        raise NoCandidateError("All candidate scores are zero")
    return j


def pursue(points: np.ndarray, i: int, k: int, eps: float,
           initial: Optional[Sequence[int]] = None) -> PointCode:
    """
    Orthogonal matching pursuit for column i against all other columns.

    The first len(initial) selections are taken from `initial` instead of the
    argmax rule; every step re-projects x_i onto the whole current support.

    Args:
        points: D x N unit-norm matrix
        i: index of the point being coded
        k: maximum support size
        eps: stop once the residual norm is <= eps
        initial: pre-selected leading support entries

    Returns:
        PointCode with support, coefficients and residual-norm history
    """
    x = points[:, i]
    residual = x
    support: List[int] = []
    coeffs = np.zeros(0)
    norms = [float(np.linalg.norm(x))]
    initial = list(initial or [])

    for step in range(k):
        if step < len(initial):
            j = initial[step]
        else:
            dots = np.abs(points.T @ residual)
            try:
                j = select_neighbor(dots, [i] + support)
            except NoCandidateError:
                break
        support.append(j)
        coeffs, residual = lstsq_project(x, points[:, support])
        norms.append(float(np.linalg.norm(residual)))
        if norms[-1] <= eps:
            break

    if not support:
        logger.warning(f"Point {i} has an empty support")
    return PointCode(support=support, coeffs=coeffs, residual_norms=norms)


def code_all(n_points: int, code_point: Callable[[int], PointCode], workers: int = 1) -> List[PointCode]:
    """Run code_point for every index; thread pool output keeps index order."""
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(code_point, range(n_points)))
    return [code_point(i) for i in range(n_points)]


def check_dataset(points: np.ndarray):
    """Self-expression needs at least two points."""
    if points.ndim != 2 or points.shape[1] < 2:
        raise DatasetTooSmallError(f"Need at least 2 points, got shape {points.shape}")
