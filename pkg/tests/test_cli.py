import json

import pandas as pd
import pytest

from src import cli
from src.families import FamilyCertificate


def read_json(path):
    with open(path, encoding='utf-8') as f:
        return json.load(f)


def test_derive_sk(run_cli, tmp_path):
    result = run_cli('derive', '--preset', 'sk')
    assert result.returncode == 0, result.stderr
    document = read_json(tmp_path / 'derive.json')
    assert document['schema'] == 1
    assert document['count'] == 15
    assert document['equations'][0] == {'power': 7, 'equation': '10*a2^3 + 180*a2^2 + 720*a2'}


def test_derive_is_byte_identical_across_runs(run_cli, tmp_path):
    first = run_cli('derive', '--symbolic', '--restricted', '--output', '-')
    second = run_cli('derive', '--symbolic', '--restricted', '--output', '-')
    assert first.returncode == 0, first.stderr
    assert first.stdout == second.stdout
    document = json.loads(first.stdout)
    assert document['params']['label'] == 'symbolic'
    assert all(r['power'] % 2 for r in document['equations'])


def test_verify_one_family(run_cli, tmp_path):
    result = run_cli('verify', '--preset', 'kk', '--family', '3')
    assert result.returncode == 0, result.stderr
    document = read_json(tmp_path / 'verify.json')
    assert document['constants']['A'] == '80'
    assert document['verified'] is True
    assert [c['mode'] for c in document['certificates']] == ['symbolic', 'exact@kk']


def test_solve_ito(run_cli, tmp_path):
    result = run_cli('solve', '--preset', 'ito', '--k', '-1')
    assert result.returncode == 0, result.stderr
    document = read_json(tmp_path / 'solve.json')
    assert document['oracle_agrees'] is True
    values = [(s['a0'], s['a2'], s['b2'], s['lambda']) for s in document['solutions']]
    assert (20.0, -30.0, 0.0, -96.0) in values


def test_solve_csv(run_cli, tmp_path):
    result = run_cli('solve', '--preset', 'sk', '--k=-1/4', '--format', 'csv')
    assert result.returncode == 0, result.stderr
    frame = pd.read_csv(tmp_path / 'solve.csv')
    assert list(frame.columns) == ['a0', 'a2', 'b2', 'lambda', 'residual_norm', 'exact',
                                   'degenerate', 'families']
    assert len(frame) >= 6


def test_eval_csv(run_cli, tmp_path):
    result = run_cli('eval', '--preset', 'sk', '--solution', 'u6', '--k', '-1',
                     '--x-min', '-1', '--x-max', '1', '--nx', '3')
    assert result.returncode == 0, result.stderr
    frame = pd.read_csv(tmp_path / 'eval.csv')
    assert list(frame.columns) == ['x', 't', 'u', 'mask']
    assert frame.loc[1, 'u'] == pytest.approx(8.0)


def test_eval_json_to_stdout(run_cli):
    result = run_cli('eval', '--preset', 'sk', '--solution', 'u1', '--k', '1',
                     '--x-min', '-1', '--x-max', '1', '--nx', '3', '--format', 'json',
                     '--output', '-')
    assert result.returncode == 0, result.stderr
    document = json.loads(result.stdout)
    assert [p['mask'] for p in document['points']] == [False, True, False]
    assert document['points'][1]['u'] is None


def test_residual_u6(run_cli, tmp_path):
    result = run_cli('residual', '--preset', 'sk', '--solution', 'u6', '--k', '-1', '--nx', '201')
    assert result.returncode == 0, result.stderr
    document = read_json(tmp_path / 'residual.json')
    assert document['passed'] is True
    assert document['riccati_chain']['max_abs_residual'] < 1e-8
    assert document['traveling_wave']['scaled_deviation'] <= 1e-10
    assert document['comparison']['pole_free'] is True
    assert document['comparison']['absolute_within_envelope'] is True


@pytest.mark.parametrize('args', [
    ('solve', '--alpha', '1', '--beta', '1', '--gamma', '0', '--omega', '1', '--k', '1'),
    ('solve', '--alpha', '1', '--beta', '1', '--k', '1'),
    ('eval', '--preset', 'sk', '--solution', 'u6', '--k', '1'),
    ('eval', '--preset', 'sk', '--k', '1'),
    ('derive', '--preset', 'sk', '--format', 'csv'),
    ('solve', '--preset', 'sk', '--k', '0'),
])
def test_usage_errors(run_cli, args):
    result = run_cli(*args)
    assert result.returncode == 2
    assert result.stdout == ''


def test_negative_discriminant_exit_code(run_cli):
    result = run_cli('solve', '--alpha', '1', '--beta', '1', '--gamma', '1', '--omega', '1',
                     '--k', '1')
    assert result.returncode == 3
    assert '❌' in result.stderr


def test_failed_certificate_exit_code(monkeypatch, tmp_path):
    failing = FamilyCertificate(family_id=1, mode='symbolic', lam='0',
                                statuses=((7, False, 'a2'),))
    monkeypatch.setattr(cli.FamilyVerifier, 'verify', lambda self, params=None: [failing])
    status = cli.main(['verify', '--family', '1', '--quiet', '--output-dir', str(tmp_path)])
    assert status == cli.EXIT_VERIFICATION_FAILED
    assert read_json(tmp_path / 'verify.json')['verified'] is False


def test_config_defaults(monkeypatch):
    monkeypatch.setenv('FKDV_OUTPUT_DIR', 'elsewhere')
    config = cli.config_from_args(cli.build_parser().parse_args(['residual', '--preset', 'lax']))
    assert config.output_dir == 'elsewhere'
    assert config.t_values == (0.0, 1.0)
    assert config.fmt == 'json'
    assert cli.config_from_args(cli.build_parser().parse_args(['eval', '--preset', 'lax'])).fmt == 'csv'
