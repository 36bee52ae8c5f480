"""
Dataset module: matrix ingestion (DMAT text files), column normalization,
PCA preprocessing and the synthetic union-of-subspaces generator.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ssc.errors import (
    ConfigInvalidError,
    DimensionInvalidError,
    DimensionMismatchError,
    FormatError,
    ZeroColumnError,
)
from ssc.numerics import sym_eigs

logger = logging.getLogger(__name__)

ZERO_NORM = 1e-12
DMAT_MAGIC = 'DMAT'

PathLike = Union[str, Path]


@dataclass
class Dataset:
    """
    D x N matrix of points (one column per point) with optional labels.

    Attributes:
        points: D x N float matrix
        labels: optional length-N int array of 0-based cluster indices
        source: provenance tag, 'synthetic' or 'file'
    """
    points: np.ndarray
    labels: Optional[np.ndarray] = None
    source: str = 'file'

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise DimensionInvalidError(f"Points must be a 2-D matrix, got shape {self.points.shape}")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape != (self.n_points,):
                raise DimensionMismatchError(
                    f"{len(self.labels)} labels for {self.n_points} points"
                )

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[0]

    @property
    def n_points(self) -> int:
        return self.points.shape[1]

    @property
    def n_clusters(self) -> Optional[int]:
        """Number of distinct ground-truth labels, or None without labels."""
        if self.labels is None:
            return None
        return len(np.unique(self.labels))


@dataclass
class SynthConfig:
    """Union-of-subspaces generator settings."""
    n_subspaces: int = 3
    subspace_dim: int = 6
    ambient_dim: int = 40
    points_per_subspace: int = 200
    noise_rate: float = 0.0
    seed: int = 0

    def validate(self):
        """Raise ConfigInvalidError if a precondition is violated."""
        if self.n_subspaces < 1:
            raise ConfigInvalidError(f"n_subspaces must be >= 1, got {self.n_subspaces}")
        if self.subspace_dim < 1:
            raise ConfigInvalidError(f"subspace_dim must be >= 1, got {self.subspace_dim}")
        if self.subspace_dim > self.ambient_dim:
            raise ConfigInvalidError(
                f"subspace_dim {self.subspace_dim} exceeds ambient_dim {self.ambient_dim}"
            )
        if self.points_per_subspace < 1:
            raise ConfigInvalidError(
                f"points_per_subspace must be >= 1, got {self.points_per_subspace}"
            )
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ConfigInvalidError(f"noise_rate must lie in [0, 1], got {self.noise_rate}")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> 'SynthConfig':
        """Parse 'n,d,D,pps,noise' (the --synth flag format)."""
        parts = [p.strip() for p in str(text).split(',')]
        if len(parts) != 5:
            raise ConfigInvalidError(f"Expected n,d,D,pps,noise but got '{text}'")
        try:
            config = cls(
                n_subspaces=int(parts[0]),
                subspace_dim=int(parts[1]),
                ambient_dim=int(parts[2]),
                points_per_subspace=int(parts[3]),
                noise_rate=float(parts[4]),
                seed=seed,
            )
        except ValueError as e:
            raise ConfigInvalidError(f"Invalid synthetic settings '{text}': {e}") from e
        config.validate()
        return config


def normalize_columns(matrix: np.ndarray) -> np.ndarray:
    """
    Scale every column to unit Euclidean norm.

    Raises:
        ZeroColumnError: if some column has norm < 1e-12
    """
    matrix = np.asarray(matrix, dtype=float)
    norms = np.linalg.norm(matrix, axis=0)
    zero = np.flatnonzero(norms < ZERO_NORM)
    if zero.size:
        raise ZeroColumnError(int(zero[0]))
    return matrix / norms


def generate_synthetic(config: SynthConfig) -> Dataset:
    """
    Draw points from a union of random linear subspaces.

    Each subspace basis is the Q factor of a seeded Gaussian D x d matrix; every
    point is basis @ g for a Gaussian d-vector g, scaled to unit norm, plus
    ambient Gaussian noise with per-coordinate std noise_rate / sqrt(D), and
    normalized again. Fully deterministic given config.seed.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    D, d, pps = config.ambient_dim, config.subspace_dim, config.points_per_subspace

    blocks = []
    for _ in range(config.n_subspaces):
        basis, _ = np.linalg.qr(rng.standard_normal((D, d)))
        blocks.append(basis @ rng.standard_normal((d, pps)))
    clean = normalize_columns(np.hstack(blocks))

    # Always drawn so that one seed gives the same subspaces at every noise rate
    noise = rng.standard_normal(clean.shape) * (config.noise_rate / np.sqrt(D))
    points = normalize_columns(clean + noise)

    labels = np.repeat(np.arange(config.n_subspaces), pps)
    logger.debug(f"Generated {points.shape[1]} points in {config.n_subspaces} subspaces "
                 f"(d={d}, D={D}, noise={config.noise_rate}, seed={config.seed})")
    return Dataset(points=points, labels=labels, source='synthetic')


def principal_coordinates(matrix: np.ndarray, p: int) -> np.ndarray:
    """
    Coordinates of the mean-centered columns along the top-p principal directions.

    Returns:
        p x N matrix (not normalized)
    """
    matrix = np.asarray(matrix, dtype=float)
    D, N = matrix.shape
    if not 1 <= p <= min(D, N):
        raise DimensionInvalidError(f"PCA dimension {p} outside [1, {min(D, N)}]")

    centered = matrix - matrix.mean(axis=1, keepdims=True)
    cov = centered @ centered.T / N
    eig = sym_eigs(cov, D)
    directions = eig.vectors[:, ::-1][:, :p]  # descending variance
    return directions.T @ centered


def pca_project(data: Dataset, p: int) -> Dataset:
    """Project onto the top-p principal directions and re-normalize the columns."""
    coords = principal_coordinates(data.points, p)
    logger.info(f"PCA: {data.ambient_dim} -> {p} dimensions for {data.n_points} points")
    return Dataset(points=normalize_columns(coords), labels=data.labels, source=data.source)


def write_dmat(matrix: np.ndarray, path: PathLike):
    """Write a raw matrix in DMAT format (header 'DMAT D N', then D rows)."""
    matrix = np.asarray(matrix, dtype=float)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    D, N = matrix.shape
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(f"{DMAT_MAGIC} {D} {N}\n")
        for row in matrix:
            f.write(' '.join(repr(float(v)) for v in row) + '\n')


def read_dmat(path: PathLike) -> np.ndarray:
    """
    Read a DMAT file into a D x N matrix without normalizing it.

    Raises:
        FileNotFoundError: if the file does not exist
        FormatError: on a bad header, token or shape
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Matrix file not found: {path}")

    with open(path, 'r', encoding='utf-8') as f:
        lines = f.read().split('\n')

    header = lines[0].split() if lines else []
    if len(header) != 3 or header[0] != DMAT_MAGIC:
        raise FormatError(path, f"expected header '{DMAT_MAGIC} <D> <N>'", line=1)
    try:
        D, N = int(header[1]), int(header[2])
    except ValueError:
        raise FormatError(path, f"non-integer dimensions in header '{lines[0]}'", line=1)
    if D < 1 or N < 1:
        raise FormatError(path, f"dimensions must be positive, got {D}x{N}", line=1)

    body = [line for line in lines[1:] if line.strip()]
    if len(body) != D:
        raise FormatError(path, f"header declares {D} rows, found {len(body)}")

    matrix = np.empty((D, N))
    for r, line in enumerate(body):
        tokens = line.split()
        if len(tokens) != N:
            raise FormatError(path, f"header declares {N} columns, row has {len(tokens)}", line=r + 2)
        try:
            matrix[r] = [float(t) for t in tokens]
        except ValueError as e:
            raise FormatError(path, f"bad number: {e}", line=r + 2)
        if not np.all(np.isfinite(matrix[r])):
            raise FormatError(path, "non-finite value", line=r + 2)

    return matrix


def save_labels(labels, path: PathLike):
    """Write one integer label per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for label in labels:
            f.write(f"{int(label)}\n")


def load_labels(path: PathLike, n_points: Optional[int] = None) -> np.ndarray:
    """
    Read a labels file and re-index the labels to dense 0-based integers.

    Args:
        path: labels file, one integer per line
        n_points: expected count (checked when given)
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Labels file not found: {path}")

    raw = []
    with open(path, 'r', encoding='utf-8') as f:
        for number, line in enumerate(f, start=1):
            token = line.strip()
            if not token:
                continue
            try:
                raw.append(int(token))
            except ValueError:
                raise FormatError(path, f"label '{token}' is not an integer", line=number)

    if n_points is not None and len(raw) != n_points:
        raise DimensionMismatchError(f"{path}: {len(raw)} labels for {n_points} points")

    _, dense = np.unique(np.array(raw, dtype=int), return_inverse=True)
    return dense.astype(int)


def load_matrix(path: PathLike, labels_path: Optional[PathLike] = None) -> Dataset:
    """Load a DMAT file (plus optional labels) as a column-normalized Dataset."""
    matrix = read_dmat(path)
    labels = load_labels(labels_path, n_points=matrix.shape[1]) if labels_path else None
    logger.info(f"Loaded {matrix.shape[0]}x{matrix.shape[1]} matrix from {path}")
    return Dataset(points=normalize_columns(matrix), labels=labels, source='file')


def save_matrix(data: Dataset, path: PathLike, labels_path: Optional[PathLike] = None):
    """Save a Dataset's points (and labels, when a path is given)."""
    write_dmat(data.points, path)
    if labels_path is not None and data.labels is not None:
        save_labels(data.labels, labels_path)
    logger.info(f"Saved {data.ambient_dim}x{data.n_points} matrix to {path}")
