"""
bench.py - Subspace clustering benchmark CLI

Commands:
  cluster  run OMP and/or RCOMP once on synthetic or file data
  sweep    reproduce the synthetic noise / points-per-subspace sweeps as CSV
  gen      write a synthetic dataset as DMAT + labels files

Any flag may also come from a key=value file given with --config; flags win.
"""
import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import dotenv_values

from ssc import config
from ssc.dataset import SynthConfig, generate_synthetic, save_matrix
from ssc.errors import ConfigInvalidError, PipelineError, SSCError
from ssc.pipeline import (
    CSV_HEADER,
    ExperimentConfig,
    SweepRow,
    cluster_dataset,
    load_data,
    run_sweep,
    write_csv,
)

logger = logging.getLogger('bench')


def setup_logging(level: str = config.LOG_LEVEL, log_file: str = config.LOG_FILE):
    """Log to stdout and to the log file, like the pipeline services."""
    Path(log_file).parent.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler(sys.stdout),
        ]
    )


def _float_list(text: str, preset: List[float]) -> List[float]:
    if str(text).strip().lower() == 'default':
        return list(preset)
    return [float(v) for v in str(text).split(',') if v.strip()]


def _int_list(text: str, preset: List[int]) -> List[int]:
    if str(text).strip().lower() == 'default':
        return list(preset)
    return [int(v) for v in str(text).split(',') if v.strip()]


# dest -> converter for values read from the config file
CONVERTERS = {
    'method': str,
    'k': int,
    'rcon': int,
    'eps': float,
    'clusters': int,
    'seed': int,
    'data': str,
    'synth': str,
    'labels': str,
    'out': str,
    'pca': int,
    'restarts': int,
    'workers': int,
    'trials': int,
    'sweep_noise': str,
    'sweep_points': str,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='RCOMP / OMP sparse subspace clustering benchmark')
    sub = parser.add_subparsers(dest='command', required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument('--config', help='key=value file supplying any flag')
        p.add_argument('--seed', type=int, help='base seed (trial t uses seed + t)')
        p.add_argument('--synth', help='synthetic data as n,d,D,pps,noise')
        p.add_argument('--labels', help='labels file (one integer per line)')
        p.add_argument('--out', help='output path')

    def coding(p: argparse.ArgumentParser):
        p.add_argument('--method', choices=['omp', 'rcomp', 'both'], help='sparse coder')
        p.add_argument('--k', type=int, help='max neighbors per point')
        p.add_argument('--rcon', type=int, help='first-neighbor budget per point (rcomp)')
        p.add_argument('--eps', type=float, help='residual-norm stopping threshold')
        p.add_argument('--clusters', type=int, help='number of clusters')
        p.add_argument('--data', help='DMAT matrix file')
        p.add_argument('--pca', type=int, help='project file data to this dimension first')
        p.add_argument('--restarts', type=int, help='k-means restarts')
        p.add_argument('--workers', type=int, help='worker threads')

    cluster = sub.add_parser('cluster', help='single clustering run')
    common(cluster)
    coding(cluster)

    sweep = sub.add_parser('sweep', help='synthetic sweep to CSV')
    common(sweep)
    coding(sweep)
    sweep.add_argument('--trials', type=int, help='trials per sweep value')
    group = sweep.add_mutually_exclusive_group()
    group.add_argument('--sweep-noise', dest='sweep_noise', help="noise rates, e.g. 0,0.4,0.8 or 'default'")
    group.add_argument('--sweep-points', dest='sweep_points', help="points per subspace list or 'default'")

    gen = sub.add_parser('gen', help='write a synthetic DMAT + labels file')
    common(gen)

    return parser


def read_config_file(path: str, allowed) -> Dict[str, object]:
    """
    Parse a key=value file into typed settings keyed by argparse dest.

    Any known flag may appear; keys outside `allowed` (flags the current
    command does not take) are skipped, unknown keys are an error.
    """
    if not Path(path).exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    settings = {}
    for key, value in dotenv_values(path).items():
        dest = key.strip().lower().replace('-', '_')
        if dest not in CONVERTERS:
            raise ConfigInvalidError(f"{path}: unknown key '{key}'")
        if dest not in allowed or value is None or value == '':
            continue
        try:
            settings[dest] = CONVERTERS[dest](value)
        except ValueError as e:
            raise ConfigInvalidError(f"{path}: bad value for '{key}': {e}") from e
    return settings


def merge_settings(args: argparse.Namespace) -> Dict[str, object]:
    """Flags override config-file values; missing keys stay absent."""
    allowed = {dest for dest in vars(args) if dest in CONVERTERS}
    settings = read_config_file(args.config, allowed) if args.config else {}
    for dest in allowed:
        value = getattr(args, dest)
        if value is not None:
            settings[dest] = value
    return settings


def experiment_from_settings(settings: Dict[str, object]) -> ExperimentConfig:
    seed = settings.get('seed', config.SEED)
    synth = SynthConfig.parse(settings['synth'], seed=seed) if settings.get('synth') else None
    sweep_noise = settings.get('sweep_noise')
    sweep_points = settings.get('sweep_points')
    try:
        return ExperimentConfig(
            method=settings.get('method', 'rcomp'),
            k=settings.get('k', config.K),
            rcon=settings.get('rcon', config.RCON),
            eps=settings.get('eps', config.EPS),
            n_clusters=settings.get('clusters'),
            trials=settings.get('trials', config.TRIALS),
            seed=seed,
            synth=synth,
            data_path=settings.get('data'),
            labels_path=settings.get('labels'),
            pca_dim=settings.get('pca'),
            sweep_noise=None if sweep_noise is None else _float_list(sweep_noise, config.SWEEP_NOISE_DEFAULT),
            sweep_points=None if sweep_points is None else _int_list(sweep_points, config.SWEEP_POINTS_DEFAULT),
            out_path=settings.get('out'),
            restarts=settings.get('restarts', config.KMEANS_RESTARTS),
            workers=settings.get('workers', config.WORKERS),
        )
    except ValueError as e:
        raise ConfigInvalidError(f"Invalid sweep list: {e}") from e


def command_cluster(cfg: ExperimentConfig) -> List[SweepRow]:
    """Run each requested method once (trial 0) on the same data."""
    cfg.validate()
    try:
        data = load_data(cfg)
    except Exception as e:
        raise PipelineError('load', cfg.source, e) from e

    rows = []
    for method in cfg.methods:
        try:
            _, report = cluster_dataset(data, cfg, method, cfg.seed)
        except Exception as e:
            raise PipelineError(f'cluster:{method}', cfg.source, e) from e
        synth = cfg.synth
        rows.append(SweepRow(
            method=method,
            k=cfg.k,
            rcon=cfg.rcon if method == 'rcomp' else None,
            noise=synth.noise_rate if synth else None,
            points_per_subspace=synth.points_per_subspace if synth else None,
            trial=0,
            report=report,
        ))
        print(f"{method}: accuracy={report.accuracy_pct:.2f}% "
              f"connectivity={report.connectivity:.4f} "
              f"subspace_preserving={report.subspace_preserving_rate:.4f} "
              f"fallbacks={report.fallback_count} isolated={report.isolated_count} "
              f"coding={report.elapsed_coding_s:.3f}s spectral={report.elapsed_spectral_s:.3f}s")

    if cfg.out_path:
        write_csv(rows, cfg.out_path)
    return rows


def command_sweep(cfg: ExperimentConfig) -> List[SweepRow]:
    rows = run_sweep(cfg)
    if cfg.out_path:
        write_csv(rows, cfg.out_path)
    else:
        writer = csv.writer(sys.stdout, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.to_csv())
    return rows


def command_gen(settings: Dict[str, object]) -> Path:
    if not settings.get('synth'):
        raise ConfigInvalidError("gen needs --synth n,d,D,pps,noise")
    if not settings.get('out'):
        raise ConfigInvalidError("gen needs --out PATH")
    synth = SynthConfig.parse(settings['synth'], seed=settings.get('seed', config.SEED))
    out = Path(settings['out'])
    labels = Path(settings.get('labels') or f"{out}.labels")
    save_matrix(generate_synthetic(synth), out, labels_path=labels)
    print(f"Wrote {out} and {labels}")
    return out


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging()

    try:
        settings = merge_settings(args)
        if args.command == 'gen':
            command_gen(settings)
        elif args.command == 'cluster':
            command_cluster(experiment_from_settings(settings))
        else:
            command_sweep(experiment_from_settings(settings))
        logger.info(f"{args.command} completed successfully")
        return 0

    except PipelineError as e:
        logger.error(f"Stage failed: {e}")
    except (SSCError, FileNotFoundError) as e:
        logger.error(f"[config] {e}")
    except Exception as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
    return 1


if __name__ == '__main__':
    sys.exit(main())
