"""Tests for the closed-form filters."""
import math

import numpy
import numpy.testing
import pytest
import scipy.integrate

from ramsey_localization import filters
from ramsey_localization import model

PERIOD_PHI = numpy.linspace(0, math.pi / 2, 1001, endpoint=False)


def test_overlap_density_is_a_unit_gaussian():
    chi = numpy.linspace(-20, 20, 8001)
    for eta, theta in ((0.0, 0.0), (0.7, 0.0), (1.2, 2.5)):
        density = numpy.abs(filters.quadrature_overlap(2.5, eta, theta, chi))**2
        mass = scipy.integrate.trapezoid(density, chi)
        mean = scipy.integrate.trapezoid(chi * density, chi)
        variance = scipy.integrate.trapezoid((chi - mean)**2 * density, chi)
        assert mass == pytest.approx(1, abs=1e-10)
        assert mean == pytest.approx(5 * math.cos(eta - theta), abs=1e-9)
        assert variance == pytest.approx(1, abs=1e-9)


def test_filters_have_period_pi():
    cfg = model.InteractionConfig(chi0=0.8)
    numpy.testing.assert_allclose(
        filters.amplitude_filter(PERIOD_PHI + math.pi, cfg),
        filters.amplitude_filter(PERIOD_PHI, cfg), rtol=1e-12, atol=1e-14)
    numpy.testing.assert_allclose(
        filters.phase_filter(PERIOD_PHI + math.pi, cfg),
        filters.phase_filter(PERIOD_PHI, cfg), rtol=1e-10, atol=1e-12)


def test_node_readout_localizes_at_nodes():
    cfg = model.InteractionConfig(chi0=5.0)
    assert float(filters.amplitude_filter(0.0, cfg)) == 1.0
    assert float(filters.amplitude_filter(math.pi / 2, cfg)) < 1e-10


def test_antinode_readout_localizes_at_antinodes():
    cfg = model.InteractionConfig(chi0=-5.0)
    assert float(filters.amplitude_filter(math.pi / 2, cfg)) == (
        pytest.approx(1, abs=1e-12))
    assert float(filters.amplitude_filter(0.0, cfg)) < 1e-10


def test_equal_superposition_interference_factors():
    cfg = model.InteractionConfig()
    delta = filters.phase_filter(PERIOD_PHI, cfg)
    i_a, i_b = filters.interference_filters(PERIOD_PHI, cfg)
    numpy.testing.assert_allclose(i_a, -1j * numpy.sin(delta), atol=1e-14)
    numpy.testing.assert_allclose(i_b, numpy.cos(delta), atol=1e-14)


def test_interference_partition_for_general_weights():
    cfg = model.InteractionConfig(
        c_a=0.6, c_b=0.8 * complex(math.cos(1.1), math.sin(1.1)))
    i_a, i_b = filters.interference_filters(PERIOD_PHI, cfg)
    numpy.testing.assert_allclose(
        numpy.abs(i_a)**2 + numpy.abs(i_b)**2, 1, rtol=1e-13)


def test_dual_filters_partition_the_envelope():
    cfg = model.InteractionConfig()
    d_squared = filters.amplitude_filter(PERIOD_PHI, cfg)**2
    i_a, i_b = filters.interference_filters(PERIOD_PHI, cfg)
    f_a = d_squared * numpy.abs(i_a)**2
    f_b = d_squared * numpy.abs(i_b)**2
    numpy.testing.assert_allclose(f_a + f_b, d_squared, rtol=0, atol=1e-12)


def test_dual_filters_have_period_half_pi():
    cfg = model.InteractionConfig()
    shifted = PERIOD_PHI + math.pi / 2
    for index in (0, 1):
        f = filters.amplitude_filter(PERIOD_PHI, cfg)**2 * numpy.abs(
            filters.interference_filters(PERIOD_PHI, cfg)[index])**2
        f_shift = filters.amplitude_filter(shifted, cfg)**2 * numpy.abs(
            filters.interference_filters(shifted, cfg)[index])**2
        numpy.testing.assert_allclose(f_shift, f, rtol=0, atol=1e-12)


def test_a_branch_dark_fringes():
    cfg = model.InteractionConfig()
    amp_a, _ = filters.dual_amplitudes(
        numpy.array([0, math.pi / 4, math.pi / 2]), cfg)
    assert numpy.all(numpy.abs(amp_a)**2 <= 1e-12)


def test_single_amplitudes_share_magnitude():
    cfg = model.InteractionConfig(chi0=1.3, ramsey_on=False)
    amp_a, amp_b = filters.single_amplitudes(PERIOD_PHI, cfg)
    numpy.testing.assert_allclose(numpy.abs(amp_a), numpy.abs(amp_b))
    numpy.testing.assert_allclose(amp_a, numpy.conj(amp_b), atol=1e-15)


def test_generalized_matches_closed_form_at_x_quadrature():
    cfg = model.InteractionConfig(chi0=1.7)
    sample = filters.generalized_filter(PERIOD_PHI, cfg)
    numpy.testing.assert_allclose(
        sample.d, filters.amplitude_filter(PERIOD_PHI, cfg), rtol=1e-12)
    numpy.testing.assert_allclose(
        sample.delta, filters.phase_filter(PERIOD_PHI, cfg), atol=1e-12)
    amp_a, amp_b = filters.dual_amplitudes(PERIOD_PHI, cfg)
    numpy.testing.assert_allclose(sample.amp_a, amp_a, atol=1e-14)
    numpy.testing.assert_allclose(sample.amp_b, amp_b, atol=1e-14)


def test_generalized_partition_off_axis():
    cfg = model.InteractionConfig(theta=math.pi / 2, chi0=0.4)
    sample = filters.generalized_filter(PERIOD_PHI, cfg)
    numpy.testing.assert_allclose(
        numpy.abs(sample.amp_a)**2 + numpy.abs(sample.amp_b)**2,
        filters.COMMON_WEIGHT**2 * sample.d**2, rtol=1e-12, atol=1e-300)
    numpy.testing.assert_allclose(
        filters.envelope_filter(PERIOD_PHI, cfg), sample.d**2)


def test_closed_forms_require_x_quadrature():
    cfg = model.InteractionConfig(theta=0.5)
    with pytest.raises(ValueError):
        filters.amplitude_filter(PERIOD_PHI, cfg)
    with pytest.raises(ValueError):
        filters.phase_filter(PERIOD_PHI, cfg)
    amp_a, amp_b = filters.branch_amplitudes(PERIOD_PHI, cfg)
    assert amp_a.shape == PERIOD_PHI.shape


def test_chi0_override_broadcasts():
    cfg = model.InteractionConfig()
    chi = numpy.array([-5.0, 0.0, 5.0])[:, None]
    amp_a, amp_b = filters.branch_amplitudes(PERIOD_PHI[None, :], cfg, chi)
    assert amp_a.shape == (3, len(PERIOD_PHI))
    expected_a, _ = filters.dual_amplitudes(
        PERIOD_PHI, cfg.replace(chi0=5.0))
    numpy.testing.assert_allclose(amp_a[2], expected_a)
