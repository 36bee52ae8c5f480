"""
Experiment pipeline: data -> sparse coding -> affinity -> spectral clustering -> metrics.
Runs single clusterings and synthetic sweeps and reads/writes the results CSV.
"""
import csv
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from ssc import config
from ssc.coders.omp import OmpParams, omp_sparse_code
from ssc.coders.rcomp import RcompParams, rcomp_sparse_code
from ssc.dataset import Dataset, SynthConfig, generate_synthetic, load_matrix, pca_project
from ssc.errors import ConfigInvalidError, PipelineError
from ssc.metrics import (
    EvalReport,
    clustering_accuracy,
    connection_summary,
    connectivity,
    subspace_preserving_rate,
)
from ssc.spectral import build_affinity, spectral_cluster

logger = logging.getLogger(__name__)

METHODS = ('omp', 'rcomp')

CSV_HEADER = [
    'method', 'k', 'rcon', 'noise', 'points_per_subspace', 'trial',
    'accuracy_pct', 'connectivity', 'subspace_preserving_rate',
    'fallback_count', 'isolated_count', 'coding_s', 'spectral_s',
]
METRIC_COLUMNS = CSV_HEADER[6:]
TIMING_COLUMNS = ('coding_s', 'spectral_s')
MEAN_TRIAL = 'mean'


@dataclass
class ExperimentConfig:
    """
    Everything one experiment needs.

    Attributes:
        method: 'omp', 'rcomp' or 'both' (sweeps and the cluster command)
        k, rcon, eps: coder parameters (rcon is ignored by omp)
        n_clusters: cluster count; defaults to the number of ground-truth labels
        trials: trials per sweep value
        seed: base seed; trial t uses seed + t
        synth: synthetic data settings (mutually exclusive with data_path)
        data_path, labels_path: DMAT matrix and labels files
        pca_dim: optional PCA dimension applied to file data
        sweep_noise, sweep_points: sweep value lists (at most one may be set)
        out_path: CSV output path
        restarts: k-means restarts
        workers: threads for coder completion and sweep trials
    """
    method: str = 'rcomp'
    k: int = config.K
    rcon: int = config.RCON
    eps: float = config.EPS
    n_clusters: Optional[int] = None
    trials: int = config.TRIALS
    seed: int = config.SEED
    synth: Optional[SynthConfig] = None
    data_path: Optional[str] = None
    labels_path: Optional[str] = None
    pca_dim: Optional[int] = None
    sweep_noise: Optional[List[float]] = None
    sweep_points: Optional[List[int]] = None
    out_path: Optional[str] = None
    restarts: int = config.KMEANS_RESTARTS
    workers: int = config.WORKERS

    @property
    def methods(self) -> Tuple[str, ...]:
        return METHODS if self.method == 'both' else (self.method,)

    @property
    def source(self) -> str:
        """Human-readable data source for error messages."""
        if self.data_path:
            return str(self.data_path)
        if self.synth:
            s = self.synth
            return (f"synth(n={s.n_subspaces}, d={s.subspace_dim}, D={s.ambient_dim}, "
                    f"pps={s.points_per_subspace}, noise={s.noise_rate})")
        return '<no data>'

    def validate(self, sweep: bool = False):
        """Raise ConfigInvalidError on inconsistent settings."""
        if self.method not in METHODS + ('both',):
            raise ConfigInvalidError(f"Unknown method '{self.method}' (omp, rcomp or both)")
        if self.k < 1:
            raise ConfigInvalidError(f"k must be >= 1, got {self.k}")
        if self.rcon < 1:
            raise ConfigInvalidError(f"rcon must be >= 1, got {self.rcon}")
        if self.eps < 0:
            raise ConfigInvalidError(f"eps must be >= 0, got {self.eps}")
        if self.trials < 1:
            raise ConfigInvalidError(f"trials must be >= 1, got {self.trials}")
        if self.n_clusters is not None and self.n_clusters < 1:
            raise ConfigInvalidError(f"clusters must be >= 1, got {self.n_clusters}")
        if (self.synth is None) == (self.data_path is None):
            raise ConfigInvalidError("Exactly one of synthetic data or a data file is required")
        if self.synth is not None:
            self.synth.validate()

        if sweep:
            if self.synth is None:
                raise ConfigInvalidError("Sweeps need synthetic data")
            if self.sweep_noise is not None and self.sweep_points is not None:
                raise ConfigInvalidError("Sweep either noise or points per subspace, not both")
            values = self.sweep_noise if self.sweep_noise is not None else self.sweep_points
            if not values:
                raise ConfigInvalidError("Sweep list is empty")


@dataclass
class SweepRow:
    """One CSV row; trial is an int for data rows and 'mean' for mean rows."""
    method: str
    k: int
    rcon: Optional[int]
    noise: Optional[float]
    points_per_subspace: Optional[int]
    trial: object
    report: EvalReport

    def to_csv(self) -> List[str]:
        r = self.report
        return [
            self.method,
            str(self.k),
            '' if self.rcon is None else str(self.rcon),
            '' if self.noise is None else repr(float(self.noise)),
            '' if self.points_per_subspace is None else str(self.points_per_subspace),
            str(self.trial),
            repr(float(r.accuracy_pct)),
            repr(float(r.connectivity)),
            repr(float(r.subspace_preserving_rate)),
            _count(r.fallback_count),
            _count(r.isolated_count),
            f"{r.elapsed_coding_s:.3f}",
            f"{r.elapsed_spectral_s:.3f}",
        ]


def _count(value) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def load_data(cfg: ExperimentConfig, trial: int = 0) -> Dataset:
    """Generate (seed + trial) or load the experiment's data."""
    if cfg.synth is not None:
        return generate_synthetic(replace(cfg.synth, seed=cfg.seed + trial))
    data = load_matrix(cfg.data_path, cfg.labels_path)
    if cfg.pca_dim:
        data = pca_project(data, cfg.pca_dim)
    return data


def cluster_dataset(data: Dataset, cfg: ExperimentConfig, method: str, seed: int) -> Tuple[np.ndarray, EvalReport]:
    """
    Run one method on already-loaded data.

    Returns:
        (predicted labels, EvalReport)
    """
    n_clusters = cfg.n_clusters or data.n_clusters
    if n_clusters is None:
        raise ConfigInvalidError("Cluster count unknown: pass --clusters or a labels file")

    start = time.perf_counter()
    fallback_count = 0
    if method == 'omp':
        coefficients = omp_sparse_code(data, OmpParams(k=cfg.k, eps=cfg.eps), workers=cfg.workers)
    else:
        coefficients, ledger = rcomp_sparse_code(
            data, RcompParams(k=cfg.k, rcon=cfg.rcon, eps=cfg.eps), workers=cfg.workers
        )
        fallback_count = ledger.fallback_count
        first = ledger.first_connection_counts()
        logger.info(f"{method}: first connections per point min {first.min()} max {first.max()}")
    coding_s = time.perf_counter() - start

    spread = connection_summary(coefficients)
    logger.info(f"{method}: connections per point min {spread['min']} max {spread['max']} "
                f"mean {spread['mean']:.2f} std {spread['std']:.2f}")

    start = time.perf_counter()
    affinity = build_affinity(coefficients)
    pred = spectral_cluster(affinity, n_clusters, seed, restarts=cfg.restarts)
    spectral_s = time.perf_counter() - start

    if data.labels is not None:
        accuracy = clustering_accuracy(data.labels, pred)
        conn = connectivity(affinity, data.labels)
        preserving = subspace_preserving_rate(coefficients, data.labels)
    else:
        accuracy, conn, preserving = float('nan'), float('nan'), float('nan')

    report = EvalReport(
        accuracy_pct=accuracy,
        connectivity=conn,
        subspace_preserving_rate=preserving,
        fallback_count=fallback_count,
        isolated_count=affinity.isolated_count(),
        elapsed_coding_s=coding_s,
        elapsed_spectral_s=spectral_s,
    )
    logger.info(f"{method}: accuracy {accuracy:.2f}% connectivity {conn:.4f} "
                f"(coding {coding_s:.3f}s, spectral {spectral_s:.3f}s)")
    return pred, report


def run_single(cfg: ExperimentConfig, trial: int = 0) -> EvalReport:
    """
    Full pipeline for one method and one trial.

    Raises:
        PipelineError: tagged with the failing stage ('load' or 'cluster') and source
    """
    cfg.validate()
    if cfg.method not in METHODS:
        raise ConfigInvalidError("run_single needs a single method (omp or rcomp)")

    try:
        data = load_data(cfg, trial)
    except Exception as e:
        raise PipelineError('load', cfg.source, e) from e

    try:
        _, report = cluster_dataset(data, cfg, cfg.method, cfg.seed + trial)
    except Exception as e:
        raise PipelineError('cluster', cfg.source, e) from e
    return report


def _mean_report(reports: List[EvalReport]) -> EvalReport:
    return EvalReport(**{
        name: float(np.mean([getattr(r, name) for r in reports]))
        for name in EvalReport.__dataclass_fields__
    })


def run_sweep(cfg: ExperimentConfig) -> List[SweepRow]:
    """
    Sweep noise rate or points per subspace.

    For every sweep value, every method and trial t (seed + t) yields a row;
    after each value's data rows one mean row per method is appended. Rows
    come out in (value, method, trial) order however trials are scheduled.
    """
    cfg.validate(sweep=True)
    sweeping_noise = cfg.sweep_noise is not None
    values = cfg.sweep_noise if sweeping_noise else cfg.sweep_points

    rows: List[SweepRow] = []
    for value in values:
        synth = (replace(cfg.synth, noise_rate=float(value)) if sweeping_noise
                 else replace(cfg.synth, points_per_subspace=int(value)))
        point_cfg = replace(cfg, synth=synth)
        logger.info(f"Sweep value {value}: {point_cfg.source}")

        for method in cfg.methods:
            method_cfg = replace(point_cfg, method=method)
            jobs = range(cfg.trials)
            if cfg.workers > 1:
                trial_cfg = replace(method_cfg, workers=1)
                with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                    reports = list(pool.map(lambda t: run_single(trial_cfg, t), jobs))
            else:
                reports = [run_single(method_cfg, t) for t in jobs]

            rcon = cfg.rcon if method == 'rcomp' else None
            for t, report in enumerate(reports):
                rows.append(SweepRow(method, cfg.k, rcon, synth.noise_rate,
                                     synth.points_per_subspace, t, report))
            rows.append(SweepRow(method, cfg.k, rcon, synth.noise_rate,
                                 synth.points_per_subspace, MEAN_TRIAL, _mean_report(reports)))

    return rows


def write_csv(rows: List[SweepRow], path):
    """Write rows under the fixed header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.to_csv())
    logger.info(f"Wrote {len(rows)} rows to {path}")


def _parse_field(name: str, text: str):
    if text == '':
        return None
    if name == 'method':
        return text
    if name == 'trial':
        return text if text == MEAN_TRIAL else int(text)
    if name in ('k', 'rcon', 'points_per_subspace'):
        return int(text)
    return float(text)


def read_csv(path) -> List[Dict]:
    """Parse a results CSV back into dicts with typed values."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Results file not found: {path}")
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_HEADER:
            raise ConfigInvalidError(f"{path}: unexpected header {reader.fieldnames}")
        return [{name: _parse_field(name, row[name]) for name in CSV_HEADER} for row in reader]
