"""End-to-end tests of the command line front end."""
import json
import math
import os

import numpy
import numpy.testing
import pandas
import pytest

from ramsey_localization import cli

SMALL_FLAT_TOP = {
    'interaction': {'alpha': 2.5, 'chi0': 0.0},
    'wavepacket': {'kind': 'flat_top', 'units': 'wavelength',
                   'half_width': 1.0},
    'grid': {'exponent': 10},
}


def _write_config(tmp_path, document, name='run.json'):
    config_path = tmp_path / name
    config_path.write_text(json.dumps(document))
    return str(config_path)


def _run(tmp_path, document, *command, out='out'):
    out_dir = tmp_path / out
    exit_code = cli.main([
        '--config', _write_config(tmp_path, document), '--out',
        str(out_dir)] + list(command))
    return exit_code, out_dir


def _read_csv(path):
    with open(path) as csv_file:
        header = csv_file.readline()
    return header, pandas.read_csv(
        path, skiprows=1, float_precision='round_trip')


def _manifest(out_dir):
    with open(out_dir / cli.MANIFEST_NAME) as manifest_file:
        return json.load(manifest_file)


def test_filters_command(tmp_path):
    exit_code, out_dir = _run(tmp_path, SMALL_FLAT_TOP, 'filters')
    assert exit_code == cli.EXIT_OK
    header, node = _read_csv(out_dir / 'filters_chi0_plus2alpha.csv')
    assert header.startswith('# ramsey-localization ')
    assert 'convention=paper-figure' in header
    assert list(node.columns) == [
        'phi', 'x_over_lambda', 'F_a', 'F_b', 'envelope', 'd', 'delta']
    assert len(node) == cli.FILTER_POINTS
    assert node['phi'][node['envelope'].idxmax()] == 0
    _, antinode = _read_csv(out_dir / 'filters_chi0_minus2alpha.csv')
    assert antinode['phi'][antinode['envelope'].idxmax()] == pytest.approx(
        math.pi / 2, abs=1e-3)
    numpy.testing.assert_allclose(
        node['x_over_lambda'], node['phi'] / math.pi)

    manifest = _manifest(out_dir)
    assert manifest['command'] == 'filters'
    assert manifest['convention'] == 'paper-figure'
    assert manifest['config'] == SMALL_FLAT_TOP
    assert sorted(entry['path'] for entry in manifest['outputs']) == [
        'filters_chi0_minus2alpha.csv', 'filters_chi0_plus2alpha.csv',
        'filters_chi0_zero.csv']
    for entry in manifest['outputs']:
        assert entry['sha256'] == cli.sha256_file(out_dir / entry['path'])


def test_posdist_and_momdist_commands(tmp_path):
    exit_code, out_dir = _run(tmp_path, SMALL_FLAT_TOP, 'posdist')
    assert exit_code == cli.EXIT_OK
    _, dual = _read_csv(out_dir / 'posdist_dual.csv')
    assert list(dual.columns) == ['phi', 'p_a', 'p_b', 'envelope']
    _, field_only = _read_csv(out_dir / 'posdist_field_only.csv')
    assert list(field_only.columns) == ['phi', 'pi_a', 'pi_b', 'envelope']
    numpy.testing.assert_allclose(
        dual['p_a'] + dual['p_b'], dual['envelope'], rtol=1e-12, atol=1e-16)

    exit_code, out_dir = _run(
        tmp_path, SMALL_FLAT_TOP, 'momdist', out='momentum')
    assert exit_code == cli.EXIT_OK
    _, momentum = _read_csv(out_dir / 'momdist_dual.csv')
    assert list(momentum.columns) == ['q', 'p_a', 'p_b']
    assert (out_dir / 'momdist_field_only.csv').exists()


def test_csv_round_trips_full_precision(tmp_path):
    _, out_dir = _run(tmp_path, SMALL_FLAT_TOP, 'filters')
    _, table = _read_csv(out_dir / 'filters_chi0_zero.csv')
    expected = numpy.linspace(0, math.pi, cli.FILTER_POINTS)
    numpy.testing.assert_array_equal(table['phi'].to_numpy(), expected)


def test_mechanics_command(tmp_path):
    document = {
        'interaction': {'alpha': 2.5},
        'wavepacket': {'kind': 'gaussian', 'units': 'wavelength',
                       'center': 0.25, 'sigma': 0.1},
        'grid': {'exponent': 11},
    }
    exit_code, out_dir = _run(
        tmp_path, document, 'mechanics', '--compare-modes')
    assert exit_code == cli.EXIT_OK
    _, sweep = _read_csv(out_dir / 'dpt_sweep.csv')
    assert len(sweep) == cli.SWEEP_PHI0_POINTS * len(cli.SWEEP_SIGMAS)
    with open(out_dir / 'mechanics_summary.json') as summary_file:
        summary = json.load(summary_file)
    assert summary['dp_t_closed'] == pytest.approx(4.529, abs=1e-3)
    with open(out_dir / 'popper.json') as popper_file:
        popper = json.load(popper_file)
    labels = [entry['label'] for entry in popper['configurations']]
    assert labels == ['dual', 'field_only']


def test_sample_command_is_deterministic(tmp_path):
    arguments = ('sample', '--count', '2000', '--seed', '9')
    exit_code, first = _run(tmp_path, SMALL_FLAT_TOP, *arguments, out='a')
    assert exit_code == cli.EXIT_OK
    exit_code, second = _run(tmp_path, SMALL_FLAT_TOP, *arguments, out='b')
    assert exit_code == cli.EXIT_OK
    assert cli.sha256_file(first / 'records.csv') == cli.sha256_file(
        second / 'records.csv')
    _, records = _read_csv(first / 'records.csv')
    assert list(records.columns) == ['chi', 'state']
    assert len(records) == 2000
    assert set(records['state']) <= {'a', 'b'}
    assert _manifest(first)['seed'] == 9


def test_validate_single_check(tmp_path):
    exit_code, out_dir = _run(
        tmp_path, SMALL_FLAT_TOP, 'validate', '--check', 'completeness')
    assert exit_code == cli.EXIT_OK
    with open(out_dir / 'validation.json') as report_file:
        report = json.load(report_file)
    assert [check['name'] for check in report['checks']] == ['completeness']
    assert report['checks'][0]['passed']


def test_validation_failure_exit_code(tmp_path, monkeypatch):
    monkeypatch.setattr(
        cli.validation, 'CHECKS',
        (('completeness', lambda _rng: (False, 'forced failure')),))
    exit_code, out_dir = _run(
        tmp_path, SMALL_FLAT_TOP, 'validate', '--check', 'completeness')
    assert exit_code == cli.EXIT_VALIDATION_FAILURE
    assert os.path.exists(out_dir / 'validation.json')


def test_regime_is_recorded(tmp_path):
    document = dict(SMALL_FLAT_TOP, regime={
        'g_a': 1.0, 'g_b': 1.0, 'delta_a': -500.0, 'delta_b': 500.0,
        'gamma_a': 1.0, 'gamma_b': 1.0})
    exit_code, out_dir = _run(tmp_path, document, 'filters')
    assert exit_code == cli.EXIT_OK
    assert _manifest(out_dir)['regime']['passed']


@pytest.mark.parametrize('document', [
    {'interaction': {'alpah': 2.5}},
    {'wavepacket': {'kind': 'tabulated', 'phi': [0.0, 1.0],
                    'amplitude_re': [0.0, 0.0]}},
    {'regime': {'g_a': 1.0, 'g_b': 1.0, 'delta_a': 500.0, 'delta_b': 500.0,
                'gamma_a': 1.0, 'gamma_b': 1.0}},
    {'regime': {'g_a': 'fast', 'g_b': 1.0, 'delta_a': -500.0,
                'delta_b': 500.0, 'gamma_a': 1.0, 'gamma_b': 1.0}},
    {'interaction': {'ramsey_on': 'false'}},
])
def test_config_errors_exit_two(tmp_path, document):
    exit_code, _ = _run(tmp_path, document, 'posdist')
    assert exit_code == cli.EXIT_CONFIG_ERROR


def test_malformed_json_exits_two(tmp_path):
    config_path = tmp_path / 'broken.json'
    config_path.write_text('{"interaction": ')
    exit_code = cli.main([
        '--config', str(config_path), '--out', str(tmp_path / 'out'),
        'filters'])
    assert exit_code == cli.EXIT_CONFIG_ERROR


def test_insufficient_padding_exits_three(tmp_path):
    document = {
        'wavepacket': {'kind': 'tabulated', 'phi': [-1, -0.5, 0, 0.5, 1],
                       'amplitude_re': [1, 1, 1, 1, 0]},
        'grid': {'exponent': 10, 'padding': 0},
    }
    exit_code, _ = _run(tmp_path, document, 'momdist')
    assert exit_code == cli.EXIT_NUMERICAL_ERROR


def test_bad_count_exits_two(tmp_path):
    exit_code, _ = _run(
        tmp_path, SMALL_FLAT_TOP, 'sample', '--count', '0', '--seed', '1')
    assert exit_code == cli.EXIT_CONFIG_ERROR


def test_sample_requires_seed(tmp_path):
    with pytest.raises(SystemExit) as error:
        _run(tmp_path, SMALL_FLAT_TOP, 'sample', '--count', '10')
    assert error.value.code == cli.EXIT_CONFIG_ERROR
