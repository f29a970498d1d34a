"""Tests for the validation suite runner."""
import math

import numpy
import pytest

from ramsey_localization import model
from ramsey_localization import validation


@pytest.mark.parametrize('name', [
    'completeness', 'overlap_lattice', 'filter_structure', 'mechanics'])
def test_quick_checks_pass(name):
    results = validation.run_validation(names=[name])
    assert len(results) == 1
    assert results[0].name == name
    assert results[0].passed, results[0].detail


def test_run_validation_keeps_check_order():
    results = validation.run_validation(
        names=['mechanics', 'completeness'])
    assert [result.name for result in results] == [
        'completeness', 'mechanics']


def test_check_names_are_unique():
    names = [name for name, _ in validation.CHECKS]
    assert len(names) == len(set(names))


def test_contract_error_reports_failure(monkeypatch):
    def broken(_rng):
        raise model.RangeError('outcome out of range')

    monkeypatch.setattr(validation, 'CHECKS', (('broken', broken),))
    result, = validation.run_validation()
    assert not result.passed
    assert 'RangeError' in result.detail


def test_validation_wavepackets():
    flat_top = validation.flat_top_comb_wavepacket(10)
    assert model.trapezoid_mass(flat_top.density(), flat_top.phi) == (
        pytest.approx(1))
    outside = numpy.abs(flat_top.phi) > math.pi + 0.1
    assert numpy.all(flat_top.values[outside] == 0)
    gaussian = validation.midway_gaussian_wavepacket(10)
    centre = model.trapezoid_mass(gaussian.density() * gaussian.phi,
                                  gaussian.phi)
    assert centre == pytest.approx(math.pi / 4, abs=1e-6)
