"""Tests for configuration, conventions, regime checks and wavepackets."""
import json
import math

import numpy
import numpy.testing
import pytest

from ramsey_localization import distributions
from ramsey_localization import model

TWO_PI = 2 * math.pi
REGIME_DOCUMENT = {
    'g_a': 1.0, 'g_b': 1.0, 'delta_a': -500.0, 'delta_b': 500.0,
    'gamma_a': 1.0, 'gamma_b': 1.0}


def reference_regime(**changes):
    values = dict(
        g_a=TWO_PI * 10, g_b=TWO_PI * 10, delta_a=-TWO_PI * 1500,
        delta_b=TWO_PI * 1500, gamma_a=TWO_PI * 6, gamma_b=TWO_PI * 6)
    values.update(changes)
    return model.PhysicalRegime(**values)


def test_interaction_defaults():
    cfg = model.InteractionConfig()
    assert cfg.g_tau == pytest.approx(math.pi)
    assert cfg.alpha == 2.5
    assert cfg.ramsey_on
    assert abs(cfg.c_a)**2 + abs(cfg.c_b)**2 == pytest.approx(1, abs=1e-12)
    assert isinstance(cfg.c_b, complex)


@pytest.mark.parametrize('changes', [
    {'c_a': 1.0, 'c_b': 0.1},
    {'alpha': -0.1},
    {'theta': TWO_PI},
    {'g_tau': math.inf},
    {'chi0': math.nan},
])
def test_interaction_rejects_bad_values(changes):
    with pytest.raises(model.ConfigError):
        model.InteractionConfig(**changes)


def test_replace_keeps_other_fields():
    cfg = model.InteractionConfig(alpha=1.5).replace(chi0=0.7)
    assert cfg.alpha == 1.5
    assert cfg.chi0 == 0.7


def test_conventions():
    figure = model.get_convention(model.PAPER_FIGURE)
    strict = model.get_convention(model.STRICT_K0)
    assert float(figure.to_phase(0.25)) == pytest.approx(math.pi / 4)
    assert float(figure.to_phase(0.5)) == pytest.approx(math.pi / 2)
    assert float(strict.to_phase(0.25)) == pytest.approx(math.pi / 2)
    with pytest.raises(model.ConfigError):
        model.get_convention('k0-halved')


def test_regime_reference_values_pass():
    report = model.validate_regime(reference_regime(), model.InteractionConfig())
    assert report.passed
    assert report.checks['detuning_a'][1] == pytest.approx(250)
    assert report.light_shift == pytest.approx((TWO_PI * 10)**2 / (
        TWO_PI * 1500))
    assert report.interaction_time == pytest.approx(
        math.pi / report.light_shift)


def test_regime_wrong_sign():
    with pytest.raises(model.SignViolationError):
        model.validate_regime(
            reference_regime(delta_a=1.0), model.InteractionConfig())
    with pytest.raises(model.SignViolationError):
        model.validate_regime(
            reference_regime(delta_b=-1.0), model.InteractionConfig())


def test_regime_imbalance_fails_balance_only():
    regime = reference_regime(g_a=TWO_PI * 10 * math.sqrt(1.1))
    report = model.validate_regime(regime, model.InteractionConfig())
    assert not report.passed
    assert report.failures() == ['balance']


def test_regime_rejects_non_finite_and_non_positive():
    with pytest.raises(model.ConfigError):
        model.validate_regime(
            reference_regime(gamma_a=math.inf), model.InteractionConfig())
    with pytest.raises(model.ConfigError):
        model.validate_regime(
            reference_regime(g_b=0.0), model.InteractionConfig())


def test_narrow_detuning_fails():
    report = model.validate_regime(
        reference_regime(gamma_b=TWO_PI * 60), model.InteractionConfig())
    assert report.failures() == ['detuning_b']


def _build(spec, exponent=12):
    return model.build_wavepacket(
        spec, distributions.make_grid(spec, exponent))


def test_flat_top_is_constant_on_support():
    wp = _build(model.WavepacketSpec.flat_top(math.pi))
    half_cell = wp.grid.spacing / 2
    inside = numpy.abs(wp.phi) <= math.pi - half_cell
    outside = numpy.abs(wp.phi) >= math.pi + half_cell
    assert model.trapezoid_mass(wp.density(), wp.phi) == pytest.approx(
        1, abs=1e-12)
    numpy.testing.assert_allclose(
        wp.density()[inside], wp.density()[inside][0], rtol=1e-12)
    assert numpy.all(wp.values[outside] == 0)


@pytest.mark.parametrize('exponent', [11, 12, 13])
def test_flat_top_support_is_exact_on_any_grid(exponent):
    wp = _build(model.WavepacketSpec.flat_top(math.pi), exponent)
    density = wp.density()
    # a full number of periods of sin^2(2 phi) averages to one half
    mean_square = model.trapezoid_mass(
        density * numpy.sin(2 * wp.phi)**2, wp.phi)
    assert mean_square == pytest.approx(0.5, abs=5e-5)
    # unnormalized length of the support
    peak = density.max()
    assert model.trapezoid_mass(density / peak, wp.phi) == pytest.approx(
        2 * math.pi, rel=1e-12)


def test_gaussian_moments():
    spec = model.WavepacketSpec.gaussian(math.pi / 4, 0.1 * math.pi)
    wp = _build(spec)
    density = wp.density()
    mean = model.trapezoid_mass(density * wp.phi, wp.phi)
    std = math.sqrt(model.trapezoid_mass(density * (wp.phi - mean)**2, wp.phi))
    assert mean == pytest.approx(math.pi / 4, abs=1e-6)
    assert std == pytest.approx(0.1 * math.pi, abs=1e-6)


def test_single_point_spike():
    spec = model.WavepacketSpec.tabulated([0.3], [2.0])
    wp = _build(spec, 10)
    nonzero = numpy.flatnonzero(wp.values)
    assert len(nonzero) == 1
    assert wp.phi[nonzero[0]] == 0.3
    assert model.trapezoid_mass(wp.density(), wp.phi) == pytest.approx(1)


def test_tabulated_interpolates_complex_amplitude():
    spec = model.WavepacketSpec.tabulated(
        [-1.0, 0.0, 1.0], [0.0, 1 + 1j, 0.0])
    wp = _build(spec, 10)
    assert numpy.all(wp.values[numpy.abs(wp.phi) > 1] == 0)
    peak = wp.values[numpy.argmax(wp.density())]
    assert peak.real == pytest.approx(peak.imag)


def test_truncation_error_reports_mass_lost():
    spec = model.WavepacketSpec.gaussian(0.0, 1.0)
    grid = distributions.Grid.from_window(0.0, 4.0, 10)
    with pytest.raises(model.TruncationError) as error:
        model.build_wavepacket(spec, grid)
    assert error.value.mass_lost > 0.04


def test_wavepacket_spec_validation():
    with pytest.raises(model.ConfigError):
        model.WavepacketSpec('triangle')
    with pytest.raises(model.ConfigError):
        model.WavepacketSpec.gaussian(0.0, 0.0)
    with pytest.raises(model.ConfigError):
        model.WavepacketSpec.tabulated([], [])


def test_parse_defaults():
    run_config = model.parse_run_config({})
    assert run_config.interaction == model.InteractionConfig()
    assert run_config.wavepacket.kind == model.FLAT_TOP
    assert run_config.grid_exponent == model.DEFAULT_GRID_EXPONENT
    assert run_config.regime is None


def test_parse_wavelength_units_and_complex_amplitudes():
    document = {
        'interaction': {
            'c_a': 0.6, 'c_b': [0.0, 0.8], 'ramsey_on': False},
        'wavepacket': {
            'kind': 'gaussian', 'units': 'wavelength', 'center': 0.25,
            'sigma': 0.1},
    }
    figure = model.parse_run_config(document, model.PAPER_FIGURE)
    strict = model.parse_run_config(document, model.STRICT_K0)
    assert figure.wavepacket.center == pytest.approx(math.pi / 4)
    assert figure.wavepacket.sigma == pytest.approx(0.1 * math.pi)
    assert strict.wavepacket.center == pytest.approx(math.pi / 2)
    assert figure.interaction.c_b == 0.8j
    assert not figure.interaction.ramsey_on


@pytest.mark.parametrize('document', [
    {'interaction': {'alpah': 2.5}},
    {'grids': {}},
    {'grid': {'exponent': 3}},
    {'grid': {'exponent': 12.5}},
    {'grid': {'padding': -1}},
    {'interaction': {'c_a': 'one'}},
    {'wavepacket': {'kind': 'gaussian', 'center': 0.1}},
    {'wavepacket': {'units': 'meters'}},
    {'regime': {'g_a': 1.0}},
    {'interaction': {'ramsey_on': 'false'}},
    {'interaction': {'ramsey_on': 0}},
    {'interaction': {'alpha': True}},
    {'interaction': {'chi0': '5'}},
    {'interaction': {'g_tau': None}},
    {'grid': {'padding': True}},
    {'regime': dict(REGIME_DOCUMENT, g_a='fast')},
    {'regime': dict(REGIME_DOCUMENT, delta_b=None)},
    {'regime': dict(REGIME_DOCUMENT, gamma_a=False)},
])
def test_parse_rejects(document):
    with pytest.raises(model.ConfigError):
        model.parse_run_config(document)


def test_parse_keeps_typed_values():
    run_config = model.parse_run_config({
        'interaction': {'ramsey_on': False, 'alpha': 3},
        'regime': dict(REGIME_DOCUMENT, g_a=2)})
    assert run_config.interaction.ramsey_on is False
    assert run_config.interaction.alpha == 3.0
    assert run_config.regime.g_a == 2.0


def test_load_reports_json_position(tmp_path):
    config_path = tmp_path / 'broken.json'
    config_path.write_text('{"interaction": {"alpha": 2.5,}}')
    with pytest.raises(model.ConfigError) as error:
        model.load_run_config(str(config_path))
    assert 'line 1' in str(error.value)


def test_load_regime_section(tmp_path):
    config_path = tmp_path / 'run.json'
    config_path.write_text(json.dumps({'regime': {
        'g_a': 1.0, 'g_b': 1.0, 'delta_a': -500.0, 'delta_b': 500.0,
        'gamma_a': 1.0, 'gamma_b': 1.0, 'margin': 200}}))
    run_config = model.load_run_config(str(config_path))
    assert run_config.regime.margin == 200
    assert model.validate_regime(
        run_config.regime, run_config.interaction).passed
