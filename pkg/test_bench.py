"""
Command-line tests for bench.py.
"""
import pytest

import bench
from ssc import config
from ssc.errors import ConfigInvalidError
from ssc.pipeline import CSV_HEADER, read_csv


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    """Keep logs/ and outputs inside the test directory."""
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _settings(argv):
    return bench.merge_settings(bench.build_parser().parse_args(argv))


def test_flags_override_config_file(tmp_path):
    cfg_file = tmp_path / 'run.cfg'
    cfg_file.write_text('k=3\nrcon=4\nsynth=3,2,10,15,0\n')
    settings = _settings(['cluster', '--config', str(cfg_file), '--k', '5'])
    assert settings['k'] == 5
    assert settings['rcon'] == 4
    assert settings['synth'] == '3,2,10,15,0'


def test_unset_values_fall_back_to_defaults():
    cfg = bench.experiment_from_settings(_settings(['cluster', '--synth', '3,2,10,15,0']))
    assert cfg.k == config.K
    assert cfg.rcon == config.RCON
    assert cfg.eps == config.EPS
    assert cfg.method == 'rcomp'
    assert cfg.synth.points_per_subspace == 15


def test_unknown_config_key(tmp_path):
    cfg_file = tmp_path / 'bad.cfg'
    cfg_file.write_text('colour=blue\n')
    with pytest.raises(ConfigInvalidError):
        _settings(['cluster', '--config', str(cfg_file)])


def test_shared_config_file_works_for_gen(tmp_path):
    cfg_file = tmp_path / 'run.cfg'
    cfg_file.write_text('k=6\nrcon=2\nmethod=both\nsynth=3,3,10,10,0\n')
    assert bench.main(['gen', '--config', str(cfg_file), '--out', 'x.dmat']) == 0
    assert (tmp_path / 'x.dmat').exists()
    assert (tmp_path / 'x.dmat.labels').exists()

    settings = _settings(['gen', '--config', str(cfg_file), '--out', 'x.dmat'])
    assert 'k' not in settings
    assert settings['synth'] == '3,3,10,10,0'


def test_sweep_presets():
    cfg = bench.experiment_from_settings({'synth': '3,6,40,10,0', 'sweep_points': 'default'})
    assert cfg.sweep_points == config.SWEEP_POINTS_DEFAULT
    cfg = bench.experiment_from_settings({'synth': '3,6,40,10,0', 'sweep_noise': '0,0.4,0.8'})
    assert cfg.sweep_noise == [0.0, 0.4, 0.8]


def test_gen_then_cluster(tmp_path, capsys):
    assert bench.main(['gen', '--synth', '3,3,15,30,0', '--seed', '4', '--out', 'data/x.dmat']) == 0
    assert (tmp_path / 'data' / 'x.dmat').exists()
    assert (tmp_path / 'data' / 'x.dmat.labels').exists()

    code = bench.main(['cluster', '--data', 'data/x.dmat', '--labels', 'data/x.dmat.labels',
                       '--method', 'both', '--k', '3', '--out', 'single.csv'])
    assert code == 0
    out = capsys.readouterr().out
    assert 'omp: accuracy=' in out
    assert 'rcomp: accuracy=' in out

    rows = read_csv(tmp_path / 'single.csv')
    assert [r['method'] for r in rows] == ['omp', 'rcomp']
    assert all(r['accuracy_pct'] >= 99.0 for r in rows)


def test_sweep_writes_csv(tmp_path):
    code = bench.main(['sweep', '--synth', '3,2,10,15,0', '--method', 'both', '--k', '2',
                       '--trials', '2', '--sweep-noise', '0,0.5', '--out', 'sweep.csv'])
    assert code == 0
    rows = read_csv(tmp_path / 'sweep.csv')
    assert len(rows) == 12
    assert [r['trial'] for r in rows[:3]] == [0, 1, 'mean']


def test_sweep_to_stdout_is_a_readable_csv(tmp_path, capsys):
    code = bench.main(['sweep', '--synth', '3,2,8,8,0', '--method', 'both', '--k', '2',
                       '--sweep-noise', '0'])
    assert code == 0
    # log records may share stdout with the CSV
    lines = capsys.readouterr().out.splitlines()
    start = lines.index(','.join(CSV_HEADER))
    csv_lines = [lines[start]] + [
        line for line in lines[start + 1:] if line.startswith(('omp,', 'rcomp,'))
    ]
    assert csv_lines[0].startswith('method,k,rcon,')

    path = tmp_path / 'stdout.csv'
    path.write_text('\n'.join(csv_lines) + '\n')
    rows = read_csv(path)
    assert [(r['method'], r['trial']) for r in rows] == [
        ('omp', 0), ('omp', 'mean'), ('rcomp', 0), ('rcomp', 'mean'),
    ]


def test_missing_data_file_fails():
    assert bench.main(['cluster', '--data', 'nowhere.dmat', '--clusters', '2']) == 1


def test_empty_sweep_list_fails():
    assert bench.main(['sweep', '--synth', '3,2,10,15,0', '--sweep-noise', ',']) == 1


def test_gen_needs_output():
    assert bench.main(['gen', '--synth', '3,2,10,15,0']) == 1
