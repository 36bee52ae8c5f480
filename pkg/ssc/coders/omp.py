"""
SSC-OMP: self-expressive sparse coding by orthogonal matching pursuit.
"""
import logging
import time
from dataclasses import dataclass

from ssc import config
from ssc.coders.utils import CoefficientMatrix, check_dataset, code_all, pursue
from ssc.dataset import Dataset
from ssc.errors import ConfigInvalidError

logger = logging.getLogger(__name__)


@dataclass
class OmpParams:
    """k: max neighbors per point; eps: residual-norm stopping threshold."""
    k: int = config.K
    eps: float = config.EPS

    def validate(self):
        if self.k < 1:
            raise ConfigInvalidError(f"k must be >= 1, got {self.k}")
        if self.eps < 0:
            raise ConfigInvalidError(f"eps must be >= 0, got {self.eps}")


def omp_sparse_code(data: Dataset, params: OmpParams, workers: int = 1) -> CoefficientMatrix:
    """
    Code every point independently with OMP over the other points.

    Args:
        data: normalized Dataset with N >= 2
        params: OmpParams
        workers: threads for coding points concurrently (output is unchanged)

    Returns:
        CoefficientMatrix with zero diagonal and <= k nonzeros per column
    """
    params.validate()
    points = data.points
    check_dataset(points)
    n = points.shape[1]

    start = time.perf_counter()
    codes = code_all(n, lambda i: pursue(points, i, params.k, params.eps), workers=workers)
    coefficients = CoefficientMatrix.from_codes(codes, params.k)

    empty = sum(1 for c in codes if not c.support)
    if empty:
        logger.warning(f"OMP left {empty} empty coefficient columns")
    logger.info(f"OMP coded {n} points (k={params.k}) in {time.perf_counter() - start:.3f}s")
    return coefficients
