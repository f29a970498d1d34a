# coding=UTF-8
"""Dipole-force analytics and the virtual-slit comparison quantities.

Potentials are in units of ħG and momenta in units of ħk₀. With φ = k₀x the
impulse of an interaction of duration τ is p_t = -Gτ·dU/dφ.
"""
import dataclasses
import logging
import math

import numpy
import pandas

from ramsey_localization import distributions
from ramsey_localization import model

LOGGER = logging.getLogger(__name__)

DENSITY_NORM_TOLERANCE = 1e-6
CURVE_POINTS = 401
SWEEP_COLUMNS = (
    'phi0', 'sigma', 'dpt_numeric', 'dpt_closed', 'dpt_smallsigma')


def _state_sign(state):
    if state == 'a':
        return -1.0
    if state == 'b':
        return 1.0
    raise ValueError(f"state must be 'a' or 'b', got {state!r}")


def dipole_potential(phi, cfg, state):
    """U_a,b = ∓α² sin²φ in units of ħG."""
    return _state_sign(state) * cfg.alpha**2 * numpy.sin(phi)**2


def transferred_momentum(phi, cfg, state):
    """p_t = ±Gτα² sin2φ in units of ħk₀, + for state a."""
    return -_state_sign(state) * cfg.g_tau * cfg.alpha**2 * numpy.sin(
        2 * numpy.asarray(phi))


def _impulse_scale(cfg):
    return cfg.g_tau * cfg.alpha**2


def _check_normalized(phi, density):
    mass = model.trapezoid_mass(density, phi)
    if abs(mass - 1) > DENSITY_NORM_TOLERANCE:
        LOGGER.error('position density integrates to %r, not 1', mass)
        raise model.NormalizationError(
            f'position density must integrate to 1, got {mass!r}')


def _expectation(phi, density, values):
    return model.trapezoid_mass(density * values, phi)


def dpt_numeric(phi, density, cfg):
    """Spread of the transferred momentum for an atom in a definite state.

    Parameters:
        phi (numpy.ndarray): uniform phase grid.
        density (numpy.ndarray): normalized position density on ``phi``.
        cfg (InteractionConfig): pulse area and field amplitude.

    Returns:
        Gτα²·sqrt(<sin²2φ> - <sin2φ>²) by trapezoidal quadrature.

    Raises:
        NormalizationError if ``density`` is not normalized within 1e-6.
    """
    phi = numpy.asarray(phi, dtype=float)
    density = numpy.asarray(density, dtype=float)
    _check_normalized(phi, density)
    kick = numpy.sin(2 * phi)
    mean = _expectation(phi, density, kick)
    variance = _expectation(phi, density, (kick - mean)**2)
    return _impulse_scale(cfg) * math.sqrt(max(variance, 0.0))


def dpt_closed(phi0, sigma_phi, cfg):
    """Gaussian closed form of ``dpt_numeric``.

    (Gτα²)²/2·(1 - e^{-8σ²}cos4φ₀ - 2e^{-4σ²}sin²2φ₀), written with expm1 so
    that small σ keeps its precision.
    """
    if not sigma_phi > 0:
        raise model.ConfigError(f'sigma_phi must be positive, got {sigma_phi}')
    sin_squared = math.sin(2 * phi0)**2
    variance = 0.5 * (
        -math.expm1(-8 * sigma_phi**2) +
        2 * sin_squared * math.exp(-4 * sigma_phi**2) *
        math.expm1(-4 * sigma_phi**2))
    return _impulse_scale(cfg) * math.sqrt(max(variance, 0.0))


def dpt_small_sigma(phi0, sigma_phi, cfg):
    """Leading order of ``dpt_closed`` for k₀σ << 1: 2Gτα²σ|cos2φ₀|."""
    return 2 * _impulse_scale(cfg) * sigma_phi * abs(math.cos(2 * phi0))


def superposed_spread(phi, density, cfg):
    """Mechanical spread of an atom entering in C_a|a> + C_b|b>.

    The two internal states are kicked in opposite directions, so the
    momentum is the mixture of +p_t (weight |C_a|²) and -p_t (weight |C_b|²)
    over the position density.
    """
    phi = numpy.asarray(phi, dtype=float)
    density = numpy.asarray(density, dtype=float)
    _check_normalized(phi, density)
    kick = transferred_momentum(phi, cfg, 'a')
    bias = abs(cfg.c_a)**2 - abs(cfg.c_b)**2
    mean = bias * _expectation(phi, density, kick)
    second_moment = _expectation(phi, density, kick**2)
    return math.sqrt(max(second_moment - mean**2, 0.0))


def gaussian_wavepacket(phi0, sigma, grid_exponent, padding):
    spec = model.WavepacketSpec.gaussian(phi0, sigma)
    grid = distributions.make_grid(spec, grid_exponent, padding)
    return model.build_wavepacket(spec, grid)


def dpt_sweep(
        phi0_values, sigma_values, cfg, grid_exponent=12,
        padding=model.DEFAULT_PADDING):
    """Tabulate the three Δp_t evaluations over a (φ₀, σ) lattice.

    Returns:
        pandas.DataFrame with columns
        ``phi0,sigma,dpt_numeric,dpt_closed,dpt_smallsigma``.
    """
    rows = []
    for phi0 in phi0_values:
        for sigma in sigma_values:
            wp = gaussian_wavepacket(phi0, sigma, grid_exponent, padding)
            rows.append((
                float(phi0), float(sigma),
                dpt_numeric(wp.phi, wp.density(), cfg),
                dpt_closed(phi0, sigma, cfg),
                dpt_small_sigma(phi0, sigma, cfg)))
    LOGGER.debug('dpt sweep evaluated %d points', len(rows))
    return pandas.DataFrame(rows, columns=list(SWEEP_COLUMNS))


@dataclasses.dataclass(frozen=True, eq=False)
class MechanicsReport:
    """Dipole-force quantities of one wavepacket and interaction.

    ``dp_t_closed`` and ``dp_t_smallsigma`` are None unless the wavepacket is
    Gaussian. ``dp_total`` maps each mode to the standard deviation of its
    branch-summed momentum distribution.
    """

    phi: numpy.ndarray
    u_a: numpy.ndarray
    u_b: numpy.ndarray
    p_t: numpy.ndarray
    dp_t_numeric: float
    dp_t_closed: object
    dp_t_smallsigma: object
    dp_total: dict

    def curves_frame(self):
        return pandas.DataFrame({
            'phi': self.phi, 'u_a': self.u_a, 'u_b': self.u_b,
            'p_t': self.p_t})

    def summary(self):
        return {
            'dp_t_numeric': self.dp_t_numeric,
            'dp_t_closed': self.dp_t_closed,
            'dp_t_smallsigma': self.dp_t_smallsigma,
            'dp_total': dict(self.dp_total),
        }


def total_momentum_spread(table, cfg):
    """Standard deviation of q over both branches of a momentum table.

    Field-only branches are definite-state distributions and enter with the
    weights |C_a|², |C_b|² of the prepared superposition.
    """
    if table.mode == distributions.FIELD_ONLY:
        combined = (abs(cfg.c_a)**2 * table['pi_a'] +
                    abs(cfg.c_b)**2 * table['pi_b'])
    else:
        combined = table['p_a'] + table['p_b']
    return distributions.axis_moments(
        distributions.uniform_density_table(table.axis, combined, 'q'),
        'density')[1]


def mechanics_report(spec, cfg, grid_exponent=model.DEFAULT_GRID_EXPONENT,
                     padding=model.DEFAULT_PADDING):
    """Build a ``MechanicsReport`` for ``spec`` under ``cfg``.

    Parameters:
        spec (WavepacketSpec): initial position amplitude.
        cfg (InteractionConfig): interaction and readout; both modes are
            evaluated regardless of ``cfg.ramsey_on``.
        grid_exponent (int): log2 of the grid size.
        padding (float): window padding in support widths.

    Returns:
        MechanicsReport.
    """
    curve_phi = numpy.linspace(0, math.pi, CURVE_POINTS)
    grid = distributions.make_grid(spec, grid_exponent, padding)
    wp = model.build_wavepacket(spec, grid)
    dp_t_closed = None
    dp_t_smallsigma = None
    if spec.kind == model.GAUSSIAN:
        dp_t_closed = dpt_closed(spec.center, spec.sigma, cfg)
        dp_t_smallsigma = dpt_small_sigma(spec.center, spec.sigma, cfg)
    dp_total = {}
    for ramsey_on in (True, False):
        table = distributions.momentum_distribution(
            wp, cfg.replace(ramsey_on=ramsey_on))
        dp_total[table.mode] = total_momentum_spread(table, cfg)
    return MechanicsReport(
        phi=curve_phi,
        u_a=dipole_potential(curve_phi, cfg, 'a'),
        u_b=dipole_potential(curve_phi, cfg, 'b'),
        p_t=transferred_momentum(curve_phi, cfg, 'a'),
        dp_t_numeric=dpt_numeric(wp.phi, wp.density(), cfg),
        dp_t_closed=dp_t_closed,
        dp_t_smallsigma=dp_t_smallsigma,
        dp_total=dp_total)


def _normalized(phi, density):
    mass = model.trapezoid_mass(density, phi)
    if not mass > 0:
        return None
    return density / mass


def _branch_entry(position, momentum, column, cfg):
    probability = position.probabilities[column]
    posterior = _normalized(position.axis, position[column])
    if posterior is None:
        return {'probability': probability, 'delta_x': None,
                'delta_p': None, 'delta_p_t': None,
                'delta_p_k_heuristic': None}
    delta_p = distributions.axis_moments(momentum, column)[1]
    delta_p_t = dpt_numeric(position.axis, posterior, cfg)
    return {
        'probability': probability,
        'delta_x': distributions.localization_width(position, column),
        'delta_p': delta_p,
        'delta_p_t': delta_p_t,
        'delta_p_k_heuristic': delta_p - delta_p_t,
    }


def popper_report(configurations, wavepackets):
    """Compare localization and momentum spreads across readouts.

    Parameters:
        configurations (list): (label, InteractionConfig) pairs, typically two,
            e.g. X vs Y quadrature or dual vs field-only.
        wavepackets: one AmplitudeField shared by every configuration or a
            list with one per configuration.

    Returns:
        JSON-compatible dict. Per configuration and branch it lists the
        branch probability, Δx, the total Δp, the definite-state Δp_t on the
        localized density and Δp_k = Δp - Δp_t (an operational reading of
        Δp ~ Δp_k + Δp_t). ``mechanical_spread`` is the superposed-state
        spread in dual mode and the definite-state one in field-only mode,
        both on the normalized envelope.
    """
    if isinstance(wavepackets, model.AmplitudeField):
        wavepackets = [wavepackets] * len(configurations)
    if len(wavepackets) != len(configurations):
        raise ValueError(
            f'{len(configurations)} configurations but {len(wavepackets)} '
            f'wavepackets')
    entries = []
    for (label, cfg), wp in zip(configurations, wavepackets):
        position = distributions.position_distribution(wp, cfg)
        momentum = distributions.momentum_distribution(wp, cfg)
        envelope = _normalized(position.axis, position['envelope'])
        if envelope is None:
            raise ValueError(f'configuration {label!r} has no envelope mass')
        if cfg.ramsey_on:
            mechanical_spread = superposed_spread(position.axis, envelope, cfg)
        else:
            mechanical_spread = dpt_numeric(position.axis, envelope, cfg)
        entry = {
            'label': label,
            'mode': position.mode,
            'theta': cfg.theta,
            'chi0': cfg.chi0,
            'delta_x_envelope': distributions.localization_width(
                position, 'envelope'),
            'delta_p_total': total_momentum_spread(momentum, cfg),
            'mechanical_spread': mechanical_spread,
            'branches': {
                column: _branch_entry(position, momentum, column, cfg)
                for column in momentum.columns},
        }
        LOGGER.info(
            '%s (%s): delta_x %.6g, mechanical spread %.6g', label,
            entry['mode'], entry['delta_x_envelope'], mechanical_spread)
        entries.append(entry)
    return {'configurations': entries}
