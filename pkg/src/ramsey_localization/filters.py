# coding=UTF-8
"""Closed-form position filters of the quadrature (and internal-state) readout.

Every function is vectorized over ``phi``; an optional ``chi0`` overrides the
configured outcome and broadcasts against ``phi`` so that whole (χ, φ) tables
can be evaluated at once.
"""
import dataclasses
import logging
import math

import numpy

LOGGER = logging.getLogger(__name__)

# (2π)^(-1/4): makes |<χ|β>|² a unit-mass density in χ
OVERLAP_NORM = (2 * math.pi)**-0.25
COMMON_WEIGHT = OVERLAP_NORM


@dataclasses.dataclass(frozen=True)
class FilterSample:
    """Per-position filter values.

    Attributes:
        phi: standing-wave phase samples.
        d: amplitude filter D (or its generalization for θ ≠ 0).
        delta: phase filter Δ.
        i_a, i_b: interference factors of the dual readout.
        amp_a, amp_b: Born amplitudes of the configured mode.
    """

    phi: numpy.ndarray
    d: numpy.ndarray
    delta: numpy.ndarray
    i_a: numpy.ndarray
    i_b: numpy.ndarray
    amp_a: numpy.ndarray
    amp_b: numpy.ndarray


def _chi(cfg, chi0):
    return cfg.chi0 if chi0 is None else numpy.asarray(chi0, dtype=float)


def _require_x_quadrature(cfg, func_name):
    if cfg.theta != 0:
        raise ValueError(
            f'{func_name} is the theta = 0 closed form; use '
            f'generalized_filter for theta = {cfg.theta}')


def light_shift(phi, cfg):
    """Pulse area G(x)τ = G·τ·sin²φ."""
    return cfg.g_tau * numpy.sin(phi)**2


def rotation_angles(phi, cfg):
    """Phase-space rotation of the field for internal states a and b."""
    angle = light_shift(phi, cfg)
    return angle, -angle


def quadrature_overlap(alpha, eta, theta, chi):
    """Return <χ_θ|α e^{iη}> including the (2π)^(-1/4) prefactor."""
    rotated = alpha * numpy.exp(1j * (numpy.asarray(eta) - theta))
    alpha_r = rotated.real
    alpha_i = rotated.imag
    return OVERLAP_NORM * numpy.exp(
        -((alpha_r - chi / 2)**2 + 1j * alpha_i * (alpha_r - chi)))


def amplitude_filter(phi, cfg, chi0=None):
    """D = exp[-(α cos(G(x)τ) - χ₀/2)²] for the X quadrature."""
    _require_x_quadrature(cfg, 'amplitude_filter')
    chi = _chi(cfg, chi0)
    return numpy.exp(
        -(cfg.alpha * numpy.cos(light_shift(phi, cfg)) - chi / 2)**2)


def phase_filter(phi, cfg, chi0=None):
    """Δ = α sin(G(x)τ)(α cos(G(x)τ) - χ₀) for the X quadrature."""
    _require_x_quadrature(cfg, 'phase_filter')
    chi = _chi(cfg, chi0)
    angle = light_shift(phi, cfg)
    return cfg.alpha * numpy.sin(angle) * (
        cfg.alpha * numpy.cos(angle) - chi)


def interference_filters(phi, cfg, chi0=None, delta=None):
    """Interference factors of the two internal-state paths.

    For the equal superposition these are (-i sinΔ, cosΔ); in general
    I_a = (C_a e^{-iΔ} - C_b e^{iΔ})/√2 and I_b = (C_a e^{-iΔ} + C_b e^{iΔ})/√2.
    """
    if delta is None:
        delta = phase_filter(phi, cfg, chi0)
    path_a = cfg.c_a * numpy.exp(-1j * delta)
    path_b = cfg.c_b * numpy.exp(1j * delta)
    return (path_a - path_b) / math.sqrt(2), (path_a + path_b) / math.sqrt(2)


def dual_amplitudes(phi, cfg, chi0=None):
    """Born amplitudes for outcome χ₀ and final state a or b, Ramsey on."""
    d = amplitude_filter(phi, cfg, chi0)
    i_a, i_b = interference_filters(phi, cfg, chi0)
    return COMMON_WEIGHT * d * i_a, COMMON_WEIGHT * d * i_b


def single_amplitudes(phi, cfg, chi0=None):
    """Born amplitudes of an atom held in a (or b), Ramsey fields off."""
    d = amplitude_filter(phi, cfg, chi0)
    delta = phase_filter(phi, cfg, chi0)
    return (COMMON_WEIGHT * d * numpy.exp(-1j * delta),
            COMMON_WEIGHT * d * numpy.exp(1j * delta))


def generalized_filter(phi, cfg, chi0=None):
    """Filters for any quadrature phase θ, straight from the overlaps.

    The two field branches rotated by ±G(x)τ are projected on |χ_θ>. The
    returned ``d`` satisfies c_w²d² = |C_a ov₊|² + |C_b ov₋|², ``delta`` is
    half the phase difference of the overlap exponents, and ``i_a``, ``i_b``
    are the dual amplitudes divided by c_w·d. At θ = 0 all of them coincide
    with the closed forms.
    """
    chi = _chi(cfg, chi0)
    phi = numpy.asarray(phi, dtype=float)
    theta_a, theta_b = rotation_angles(phi, cfg)
    overlap_a = quadrature_overlap(cfg.alpha, theta_a, cfg.theta, chi)
    overlap_b = quadrature_overlap(cfg.alpha, theta_b, cfg.theta, chi)

    def _exponent_phase(eta):
        rotated = cfg.alpha * numpy.exp(1j * (eta - cfg.theta))
        return -rotated.imag * (rotated.real - chi)

    delta = 0.5 * (_exponent_phase(theta_b) - _exponent_phase(theta_a))
    dual_a = (cfg.c_a * overlap_a - cfg.c_b * overlap_b) / math.sqrt(2)
    dual_b = (cfg.c_a * overlap_a + cfg.c_b * overlap_b) / math.sqrt(2)
    d = numpy.sqrt(
        abs(cfg.c_a)**2 * numpy.abs(overlap_a)**2 +
        abs(cfg.c_b)**2 * numpy.abs(overlap_b)**2) / COMMON_WEIGHT
    weight = COMMON_WEIGHT * d
    with numpy.errstate(invalid='ignore', divide='ignore'):
        i_a = numpy.where(weight > 0, dual_a / weight, 0)
        i_b = numpy.where(weight > 0, dual_b / weight, 0)
    if cfg.ramsey_on:
        amp_a, amp_b = dual_a, dual_b
    else:
        amp_a, amp_b = overlap_a, overlap_b
    return FilterSample(
        phi=phi, d=d, delta=delta, i_a=i_a, i_b=i_b, amp_a=amp_a,
        amp_b=amp_b)


def branch_amplitudes(phi, cfg, chi0=None):
    """Born amplitudes (amp_a, amp_b) of the configured mode and θ."""
    if cfg.theta != 0:
        sample = generalized_filter(phi, cfg, chi0)
        return sample.amp_a, sample.amp_b
    if cfg.ramsey_on:
        return dual_amplitudes(phi, cfg, chi0)
    return single_amplitudes(phi, cfg, chi0)


def envelope_filter(phi, cfg, chi0=None):
    """Squared amplitude filter d² of the field-only envelope."""
    if cfg.theta != 0:
        return generalized_filter(phi, cfg, chi0).d**2
    return amplitude_filter(phi, cfg, chi0)**2
