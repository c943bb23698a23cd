"""
Tests for the command-line surface: artifacts, precedence and exit codes.
"""

import json

import pytest

from app import __version__
from app.cli import build_parser, resolve_run_config, run
from app.config import TestingConfig
from app.constants import EXIT_SUCCESS, EXIT_USAGE, EXIT_RESOURCE, EXIT_INVARIANT
from app.models.constant_estimate import ConstantEstimate


def invoke(*argv):
    return run(list(argv), config_class = TestingConfig)


def test_spacing_run_is_reproducible(tmp_path):
    command = ['spacing', '--D1', '2', '--D2', '2', '--N1', '8', '--N2', '8', '--k', '2', '--delta', '1e-3']
    assert invoke(*command, '--output', str(tmp_path / 'first')) == EXIT_SUCCESS
    assert invoke(*command, '--output', str(tmp_path / 'second'), '--naive') == EXIT_SUCCESS

    first = (tmp_path / 'first' / 'spacing.csv').read_bytes()
    second = (tmp_path / 'second' / 'spacing.csv').read_bytes()
    assert first == second
    assert first.decode('utf-8').splitlines()[0] == 'D1,D2,N1,N2,k,delta,count,envelope,ratio'
    assert b'\r\n' not in first


def test_delta_csv_independent_of_threads(tmp_path):
    command = ['delta', '--problem', 'threedim', '--k', '3', '--x-max', '20000', '--points', '300']
    assert invoke(*command, '--threads', '1', '--output', str(tmp_path / 'one')) == EXIT_SUCCESS
    assert invoke(*command, '--threads', '4', '--output', str(tmp_path / 'four')) == EXIT_SUCCESS
    one = (tmp_path / 'one' / 'delta.csv').read_bytes()
    assert one == (tmp_path / 'four' / 'delta.csv').read_bytes()
    lines = one.decode('utf-8').splitlines()
    assert lines[0] == 'x,summatory,main,delta'
    assert len(lines) == 301


def test_tong_report(tmp_path):
    assert invoke('constants', '--kind', 'tong', '--output', str(tmp_path)) == EXIT_SUCCESS
    document = json.loads((tmp_path / 'constants.json').read_text(encoding = 'utf-8'))
    assert document['version'] == __version__
    assert document['config']['command'] == 'constants'
    estimates = document['report']['estimates']
    assert len(estimates) == 1
    assert estimates[0]['kind'] == 'tong'
    assert float(estimates[0]['value']) == pytest.approx(0.6542, abs = 1e-4)


def test_sieve_report(tmp_path):
    assert invoke('sieve', '--hi', '101', '--k', '2', '--output', str(tmp_path)) == EXIT_SUCCESS
    lines = (tmp_path / 'sieve.csv').read_text(encoding = 'utf-8').splitlines()
    assert lines[0] == 'n,d,mu,dk,d11k'
    assert len(lines) == 101
    summary = json.loads((tmp_path / 'sieve.json').read_text(encoding = 'utf-8'))['report']
    assert summary['sums']['d'] == 482
    assert summary['mertens_at_hi_minus_1'] == 1


def test_meansquare_artifacts(tmp_path):
    status = invoke('meansquare', '--problem', 'dirichlet', '--T', '500', '--checkpoints', '4',
                    '--output', str(tmp_path))
    assert status == EXIT_SUCCESS
    report = json.loads((tmp_path / 'meansquare.json').read_text(encoding = 'utf-8'))['report']
    assert report['problem'] == 'dirichlet'
    assert report['numerator']['kind'] == 'divisor-square'
    lines = (tmp_path / 'ratio_trace.csv').read_text(encoding = 'utf-8').splitlines()
    assert lines[0] == 'T,integral,predicted,ratio'
    assert len(lines) == 5


def test_every_artifact_independent_of_threads(tmp_path):
    command = ['meansquare', '--problem', 'kfree', '--k', '3', '--T', '3000', '--checkpoints', '5']
    assert invoke(*command, '--threads', '1', '--output', str(tmp_path / 'one')) == EXIT_SUCCESS
    assert invoke(*command, '--threads', '4', '--output', str(tmp_path / 'four')) == EXIT_SUCCESS
    names = sorted(path.name for path in (tmp_path / 'one').iterdir())
    assert 'meansquare.json' in names
    assert names == sorted(path.name for path in (tmp_path / 'four').iterdir())
    for name in names:
        assert (tmp_path / 'one' / name).read_bytes() == (tmp_path / 'four' / name).read_bytes()

    config = json.loads((tmp_path / 'one' / 'meansquare.json').read_text(encoding = 'utf-8'))['config']
    assert 'threads' not in config
    assert 'output_path' not in config
    assert config['k'] == 3


def test_voronoi_artifacts(tmp_path):
    status = invoke('voronoi', '--V', '100', '--z', '10', '--points', '50', '--x', '1000', '--k', '3',
                    '--y', '2.5', '--output', str(tmp_path))
    assert status == EXIT_SUCCESS
    lines = (tmp_path / 'voronoi.csv').read_text(encoding = 'utf-8').splitlines()
    assert lines[0] == 'u,delta,delta1,delta2'
    assert len(lines) == 51
    report = json.loads((tmp_path / 'voronoi.json').read_text(encoding = 'utf-8'))['report']
    assert report['residual_mean_square']['z'] == 10
    assert report['decomposition']['truncation'] == {'z': 10, 'y': 2.5, 'k': 3}


def test_divergent_constant_is_a_usage_error(tmp_path):
    assert invoke('constants', '--kind', 'Bk', '--k', '2', '--output', str(tmp_path)) == EXIT_USAGE
    assert invoke('meansquare', '--problem', 'kfree', '--k', '2', '--T', '100',
                  '--output', str(tmp_path)) == EXIT_USAGE


def test_resource_limit_exit_code(tmp_path):
    assert invoke('sieve', '--hi', '3e6', '--output', str(tmp_path)) == EXIT_RESOURCE


def test_disagreement_exit_code(tmp_path, monkeypatch):
    monkeypatch.setattr(ConstantEstimate, 'agrees_with', lambda self, other: False)
    status = invoke('constants', '--kind', 'divisor-square', '--method', 'both', '--M', '4096',
                    '--output', str(tmp_path))
    assert status == EXIT_INVARIANT
    report = json.loads((tmp_path / 'constants.json').read_text(encoding = 'utf-8'))['report']
    assert report['agreement']['agree'] is False
    assert len(report['estimates']) == 2


def test_usage_errors(tmp_path):
    assert invoke() == EXIT_USAGE
    assert invoke('delta', '--x-max', '100', '--threads', '0', '--output', str(tmp_path)) == EXIT_USAGE
    assert invoke('delta', '--problem', 'kfree', '--x-max', '100', '--output', str(tmp_path)) == EXIT_USAGE
    assert invoke('delta', '--x-max', '100', '--config', str(tmp_path / 'missing.json')) == EXIT_USAGE
    assert invoke('spacing', '--D1', '1', '--D2', '1', '--N1', '1', '--N2', '1', '--k', '2',
                  '--output', str(tmp_path)) == EXIT_USAGE


def test_config_file_supplies_parameters(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'problem': 'kfree', 'k': 3, 'x_max': 500, 'points': 20}), encoding = 'utf-8')
    assert invoke('delta', '--config', str(path), '--output', str(tmp_path / 'out')) == EXIT_SUCCESS
    lines = (tmp_path / 'out' / 'delta.csv').read_text(encoding = 'utf-8').splitlines()
    assert len(lines) == 21


def test_precedence_flags_environment_file_defaults():
    parser = build_parser()
    file_values = {'k': 5, 'points': 7, 'x_max': 100.0, 'cache_dir': '/from/file', 'threads': 2}

    args = parser.parse_args(['delta', '--k', '3'])
    resolved = resolve_run_config(args, file_values, environ = {'KFDL_CACHE_DIR': '/from/env'},
                                  config_class = TestingConfig)
    assert resolved.k == 3
    assert resolved.threads == 2
    assert resolved.get('points') == 7
    assert resolved.get('x_min') == 1.0
    assert resolved.get('problem') == 'dirichlet'
    assert resolved.cache_dir == '/from/env'
    assert resolved.output_path.endswith('delta')

    args = parser.parse_args(['delta', '--cache-dir', '/from/flag', '--points', '9'])
    resolved = resolve_run_config(args, file_values, environ = {'KFDL_CACHE_DIR': '/from/env'},
                                  config_class = TestingConfig)
    assert resolved.cache_dir == '/from/flag'
    assert resolved.get('points') == 9
    assert resolved.k == 5

    args = parser.parse_args(['delta'])
    assert resolve_run_config(args, file_values, environ = {}, config_class = TestingConfig).cache_dir == '/from/file'
    assert resolve_run_config(args, {}, environ = {}, config_class = TestingConfig).cache_dir == TestingConfig.CACHE_DIR
