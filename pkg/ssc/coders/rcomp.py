"""
RCOMP: restricted-connection OMP.

The first neighbor a point chooses is picked through a control mask that
limits how many points may choose the same point first (the budget rcon).
Later neighbors are chosen by plain OMP.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Set, Tuple

import numpy as np

from ssc import config
from ssc.coders.utils import CoefficientMatrix, check_dataset, code_all, pursue, select_neighbor
from ssc.dataset import Dataset
from ssc.errors import ConfigInvalidError, NoCandidateError

logger = logging.getLogger(__name__)


@dataclass
class RcompParams:
    """
    k: max neighbors per point
    rcon: how many points may choose a given point as their first neighbor
    eps: residual-norm stopping threshold
    """
    k: int = config.K
    rcon: int = config.RCON
    eps: float = config.EPS

    def validate(self):
        if self.k < 1:
            raise ConfigInvalidError(f"k must be >= 1, got {self.k}")
        if self.rcon < 1:
            raise ConfigInvalidError(f"rcon must be >= 1, got {self.rcon}")
        if self.eps < 0:
            raise ConfigInvalidError(f"eps must be >= 0, got {self.eps}")


class ControlState:
    """
    Implicit control matrix M over N points.

    M is never materialized. Its zero entries come in three kinds: the
    diagonal, single entries (a point may not choose back the point that chose
    it first) and whole columns (points whose budget is used up).

    Attributes:
        rcon: per-point budget
        ncon: remaining budget per point
        exhausted: points that can no longer be chosen (column of M is zero)
    """

    def __init__(self, n_points: int, rcon: int):
        self.n_points = n_points
        self.rcon = rcon
        self.ncon = np.full(n_points, rcon, dtype=int)
        self.exhausted: Set[int] = set()
        self._choosers: Dict[int, Set[int]] = {}

    @property
    def restricted(self) -> bool:
        """False when the budget can never bind (rcon >= N - 1)."""
        return self.rcon < self.n_points - 1

    @property
    def blocked_pairs(self) -> Set[Tuple[int, int]]:
        """(j, i) means j chose i first, so i may not choose j."""
        return {(j, i) for i, choosers in self._choosers.items() for j in choosers}

    def block(self, j: int, i: int):
        """Zero the single entry of M that lets i choose j."""
        self._choosers.setdefault(i, set()).add(j)

    def blocked_for(self, i: int) -> Set[int]:
        """Candidates masked for point i by single-entry zeros."""
        return self._choosers.get(i, set())

    def record_selection(self, i: int, j: int):
        """Point i chose j as its first neighbor."""
        if self.ncon[j] > 0:
            self.ncon[j] -= 1
        if self.restricted:
            self.block(i, j)
        if self.ncon[j] == 0:
            self.exhausted.add(j)

    def drop_column(self, j: int):
        """Zero column j of M so that no point can choose j again."""
        self.ncon[j] = 0
        self.exhausted.add(j)


@dataclass
class ConnectionLedger:
    """
    First-neighbor connections of a run.

    Attributes:
        first_neighbor_of: first neighbor of each point (-1 if none)
        incoming_first: restricted first selections received per point
        fallback_incoming: fallback first selections received per point
        fallback_points: points whose first neighbor came from the fallback
    """
    first_neighbor_of: np.ndarray
    incoming_first: np.ndarray
    fallback_incoming: np.ndarray
    fallback_points: List[int] = field(default_factory=list)

    @classmethod
    def empty(cls, n_points: int) -> 'ConnectionLedger':
        return cls(
            first_neighbor_of=np.full(n_points, -1, dtype=int),
            incoming_first=np.zeros(n_points, dtype=int),
            fallback_incoming=np.zeros(n_points, dtype=int),
        )

    @property
    def fallback_count(self) -> int:
        return len(self.fallback_points)

    def first_connection_counts(self) -> np.ndarray:
        """connection-1 plus connection-2 per point."""
        outgoing = (self.first_neighbor_of >= 0).astype(int)
        return outgoing + self.incoming_first + self.fallback_incoming


def apply_mask(dots: np.ndarray, state: ControlState, i: int) -> np.ndarray:
    """Multiply the scores of point i by row i of the control matrix."""
    masked = np.array(dots, dtype=float, copy=True)
    masked[i] = 0.0
    if state.exhausted:
        masked[list(state.exhausted)] = 0.0
    blocked = state.blocked_for(i)
    if blocked:
        masked[list(blocked)] = 0.0
    return masked


def rcomp_select_first(i: int, dots: np.ndarray, state: ControlState) -> Tuple[int, ControlState, bool]:
    """
    Choose the first neighbor of point i under the control mask and update the state.

    When the mask leaves no positive score, the raw argmax (excluding i) is
    taken instead and the state is still updated.

    Returns:
        (j, state, used_fallback)

    Raises:
        NoCandidateError: if even the raw scores are all zero
    """
    used_fallback = False
    try:
        j = select_neighbor(apply_mask(dots, state, i), [i])
    except NoCandidateError:
        j = select_neighbor(dots, [i])
        used_fallback = True
        logger.debug(f"Point {i}: every candidate masked, fallback to {j}")

    state.record_selection(i, j)
    return j, state, used_fallback


def rcomp_sparse_code(data: Dataset, params: RcompParams,
                      workers: int = 1) -> Tuple[CoefficientMatrix, ConnectionLedger]:
    """
    Code every point with restricted first-neighbor selection.

    Pass 1 visits points in ascending index order and fixes each first
    neighbor through a single shared ControlState. Pass 2 completes every
    point's support with plain OMP; points are independent there, so it may
    run on a thread pool.

    Args:
        data: normalized Dataset with N >= 2
        params: RcompParams
        workers: threads for pass 2

    Returns:
        (CoefficientMatrix, ConnectionLedger)
    """
    params.validate()
    points = data.points
    check_dataset(points)
    n = points.shape[1]

    start = time.perf_counter()
    state = ControlState(n, params.rcon)
    ledger = ConnectionLedger.empty(n)

    for i in range(n):
        dots = np.abs(points.T @ points[:, i])
        try:
            j, state, used_fallback = rcomp_select_first(i, dots, state)
        except NoCandidateError:
            logger.warning(f"Point {i} has no candidate neighbor")
            continue
        ledger.first_neighbor_of[i] = j
        if used_fallback:
            ledger.fallback_incoming[j] += 1
            ledger.fallback_points.append(i)
        else:
            ledger.incoming_first[j] += 1

    def complete(i: int):
        first = ledger.first_neighbor_of[i]
        initial = [int(first)] if first >= 0 else []
        return pursue(points, i, params.k, params.eps, initial=initial)

    codes = code_all(n, complete, workers=workers)
    coefficients = CoefficientMatrix.from_codes(codes, params.k)

    if ledger.fallback_count:
        logger.warning(f"RCOMP used the fallback for {ledger.fallback_count} of {n} points")
    logger.info(f"RCOMP coded {n} points (k={params.k}, rcon={params.rcon}) "
                f"in {time.perf_counter() - start:.3f}s")
    return coefficients, ledger
