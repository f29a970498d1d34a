# coding=UTF-8
"""Born-rule Monte Carlo of (quadrature outcome, internal state) records."""
import dataclasses
import logging
import math

import numpy
import pandas
import scipy.integrate
import scipy.stats

from ramsey_localization import filters
from ramsey_localization import model

LOGGER = logging.getLogger(__name__)

GENERATOR_NAME = 'PCG64'
CHI_POINTS = 8001
CHI_MARGIN = 8.0
# the outcome grid must reach this far past ±2α
REQUIRED_CHI_MARGIN = 6.0
MASS_TOLERANCE = 1e-6
# prior samples below this fraction of the peak density are skipped
PRIOR_CUTOFF = 1e-32
CHI_BLOCK = 128
DEFAULT_CHUNK_SIZE = 10000
FIT_BINS = 60
MIN_EXPECTED_COUNT = 5.0


@dataclasses.dataclass(frozen=True, eq=False)
class OutcomeDensity:
    """Joint density ρ(χ, s) of the quadrature outcome and final state."""

    chi: numpy.ndarray
    density_a: numpy.ndarray
    density_b: numpy.ndarray

    @property
    def marginal(self):
        return self.density_a + self.density_b

    def total_mass(self):
        return model.trapezoid_mass(self.marginal, self.chi)

    def probability(self, state):
        density = self.density_a if state == 'a' else self.density_b
        return model.trapezoid_mass(density, self.chi)

    def cdf(self):
        """Normalized cumulative marginal, piecewise linear between nodes."""
        cumulative = scipy.integrate.cumulative_trapezoid(
            self.marginal, self.chi, initial=0)
        return cumulative / cumulative[-1]


@dataclasses.dataclass(frozen=True)
class MeasurementRecord:
    """One measured atom.

    Attributes:
        index (int): position in the sampled sequence.
        chi (float): quadrature outcome.
        state (str): final internal state, 'a' or 'b'.
        joint_density (float): ρ(χ, state) at the drawn outcome; its
            posterior position density comes from ``posterior_density``.
    """

    index: int
    chi: float
    state: str
    joint_density: float


def default_chi_grid(alpha):
    reach = 2 * abs(alpha) + CHI_MARGIN
    return numpy.linspace(-reach, reach, CHI_POINTS)


def _support(wp):
    """Prior samples carrying mass and their trapezoid weights."""
    density = wp.density()
    weights = density * wp.grid.spacing
    weights[0] *= 0.5
    weights[-1] *= 0.5
    mask = density > PRIOR_CUTOFF * density.max()
    return wp.phi[mask], wp.values[mask], weights[mask]


def _state_weights(cfg):
    if cfg.ramsey_on:
        return 1.0, 1.0
    return abs(cfg.c_a)**2, abs(cfg.c_b)**2


def outcome_density(wp, cfg, chi_grid=None):
    """Integrate the branch Born densities over the prior position density.

    Parameters:
        wp (AmplitudeField): normalized initial amplitude.
        cfg (InteractionConfig): interaction and readout (``chi0`` unused).
        chi_grid (numpy.ndarray): ascending outcome grid, 8001 points over
            [-2α-8, 2α+8] if None.

    Returns:
        OutcomeDensity with ∫dχ Σ_s ρ(χ, s) = 1. In field-only mode the
        definite-state branches are weighted by |C_a|², |C_b|².

    Raises:
        MassDeficitError if the grid does not span [-2α-6, 2α+6] or loses
        more than 1e-6 of the mass.
    """
    chi = default_chi_grid(cfg.alpha) if chi_grid is None else (
        numpy.asarray(chi_grid, dtype=float))
    phi, _, weights = _support(wp)
    weight_a, weight_b = _state_weights(cfg)
    density_a = numpy.empty(len(chi))
    density_b = numpy.empty(len(chi))
    for start in range(0, len(chi), CHI_BLOCK):
        block = chi[start:start + CHI_BLOCK]
        amp_a, amp_b = filters.branch_amplitudes(
            phi[None, :], cfg, chi0=block[:, None])
        density_a[start:start + CHI_BLOCK] = weight_a * (
            numpy.abs(amp_a)**2 @ weights)
        density_b[start:start + CHI_BLOCK] = weight_b * (
            numpy.abs(amp_b)**2 @ weights)
    result = OutcomeDensity(chi=chi, density_a=density_a, density_b=density_b)

    deficit = 1.0 - result.total_mass()
    reach = 2 * abs(cfg.alpha) + REQUIRED_CHI_MARGIN
    if chi[0] > -reach or chi[-1] < reach or abs(deficit) > MASS_TOLERANCE:
        LOGGER.error(
            'outcome grid [%g, %g] misses mass %g', chi[0], chi[-1], deficit)
        raise model.MassDeficitError(
            f'chi grid [{chi[0]:g}, {chi[-1]:g}] must span at least '
            f'[{-reach:g}, {reach:g}] and hold the full outcome mass',
            deficit)
    return result


def _draw(density, count, seed, chunk_size):
    """Inverse-CDF draws of χ then conditional state draws, chunked.

    Every chunk has its own stream spawned from ``seed`` so the sequence
    does not depend on how the chunks are scheduled.
    """
    cdf = density.cdf()
    marginal = density.marginal
    n_chunks = int(math.ceil(count / chunk_size))
    streams = numpy.random.SeedSequence(seed).spawn(n_chunks)
    chi_draws = []
    state_draws = []
    for chunk_index, stream in enumerate(streams):
        size = min(chunk_size, count - chunk_index * chunk_size)
        generator = numpy.random.Generator(numpy.random.PCG64(stream))
        chi_sample = numpy.interp(generator.random(size), cdf, density.chi)
        joint_a = numpy.interp(chi_sample, density.chi, density.density_a)
        total = numpy.interp(chi_sample, density.chi, marginal)
        with numpy.errstate(invalid='ignore', divide='ignore'):
            ratio_a = numpy.where(total > 0, joint_a / total, 0.0)
        in_a = generator.random(size) < ratio_a
        chi_draws.append(chi_sample)
        state_draws.append(in_a)
    return numpy.concatenate(chi_draws), numpy.concatenate(state_draws)


def sample_records(
        wp, cfg, count, seed, chi_grid=None, chunk_size=DEFAULT_CHUNK_SIZE):
    """Draw ``count`` i.i.d. measurement records, reproducibly for ``seed``.

    Parameters:
        wp (AmplitudeField): normalized initial amplitude.
        cfg (InteractionConfig): interaction and readout mode.
        count (int): number of records, at least 1.
        seed (int): seed of the ``GENERATOR_NAME`` streams; required.
        chi_grid (numpy.ndarray): outcome grid for ``outcome_density``.
        chunk_size (int): records drawn per spawned stream.

    Returns:
        list of MeasurementRecord in draw order.
    """
    if count < 1:
        raise ValueError(f'count must be >= 1, got {count}')
    if seed is None:
        raise ValueError('an explicit seed is required')
    density = outcome_density(wp, cfg, chi_grid)
    chi_sample, in_a = _draw(density, count, seed, chunk_size)
    joint = numpy.where(
        in_a,
        numpy.interp(chi_sample, density.chi, density.density_a),
        numpy.interp(chi_sample, density.chi, density.density_b))
    LOGGER.info(
        'drew %d records with %s seed %d, %d in state a', count,
        GENERATOR_NAME, seed, int(in_a.sum()))
    return [
        MeasurementRecord(
            index=index, chi=float(chi_value),
            state='a' if state_a else 'b', joint_density=float(value))
        for index, (chi_value, state_a, value) in enumerate(
            zip(chi_sample, in_a, joint))]


def records_frame(records):
    """Records as a ``chi,state`` DataFrame."""
    return pandas.DataFrame({
        'chi': [record.chi for record in records],
        'state': [record.state for record in records],
    })


def _posterior_rows(wp, cfg, chi_values, states):
    phi, values, _ = _support(wp)
    amp_a, amp_b = filters.branch_amplitudes(
        phi[None, :], cfg, chi0=numpy.asarray(chi_values)[:, None])
    amplitude = numpy.where(
        numpy.asarray(states)[:, None] == 'a', amp_a, amp_b)
    rows = numpy.zeros((len(chi_values), len(wp.phi)))
    mask = wp.density() > PRIOR_CUTOFF * wp.density().max()
    rows[:, mask] = numpy.abs(values * amplitude)**2
    masses = scipy.integrate.trapezoid(rows, wp.phi, axis=1)
    if numpy.any(masses <= 0):
        raise ValueError('a record has zero posterior mass')
    return rows / masses[:, None]


def posterior_density(record, wp, cfg):
    """Normalized position density conditioned on one record."""
    return _posterior_rows(wp, cfg, [record.chi], [record.state])[0]


def mean_posterior(records, wp, cfg, block=256):
    """Record-averaged posterior; converges to the prior |f|²."""
    total = numpy.zeros(len(wp.phi))
    for start in range(0, len(records), block):
        chunk = records[start:start + block]
        total += _posterior_rows(
            wp, cfg, [record.chi for record in chunk],
            [record.state for record in chunk]).sum(axis=0)
    return total / len(records)


@dataclasses.dataclass(frozen=True)
class FitResult:
    statistic: float
    p_value: float
    bins: int


def goodness_of_fit(chi_sample, density, bins=FIT_BINS):
    """χ² test of sampled outcomes against the outcome marginal.

    Equal-width bins over the outcome grid take their expected counts from
    the cumulative marginal; bins expecting fewer than five counts are merged
    into their neighbours.
    """
    chi_sample = numpy.asarray(chi_sample, dtype=float)
    edges = numpy.linspace(density.chi[0], density.chi[-1], bins + 1)
    expected_fraction = numpy.diff(
        numpy.interp(edges, density.chi, density.cdf()))
    observed, _ = numpy.histogram(chi_sample, bins=edges)
    expected = expected_fraction * len(chi_sample)

    merged_observed = []
    merged_expected = []
    pending_observed = 0.0
    pending_expected = 0.0
    for count, mass in zip(observed, expected):
        pending_observed += count
        pending_expected += mass
        if pending_expected >= MIN_EXPECTED_COUNT:
            merged_observed.append(pending_observed)
            merged_expected.append(pending_expected)
            pending_observed = 0.0
            pending_expected = 0.0
    if merged_expected:
        merged_observed[-1] += pending_observed
        merged_expected[-1] += pending_expected
    if len(merged_expected) < 2:
        raise ValueError('too few samples for a goodness-of-fit test')
    merged_expected = numpy.array(merged_expected)
    merged_observed = numpy.array(merged_observed)
    # rescale away the rounding of the cumulative marginal
    merged_expected *= merged_observed.sum() / merged_expected.sum()
    statistic, p_value = scipy.stats.chisquare(
        merged_observed, merged_expected)
    return FitResult(
        statistic=float(statistic), p_value=float(p_value),
        bins=len(merged_expected))


def summarize_records(records, density, seed):
    """Frequencies, branch probabilities and the fit of a record set."""
    count = len(records)
    in_a = sum(1 for record in records if record.state == 'a')
    try:
        fit = goodness_of_fit([record.chi for record in records], density)
    except ValueError:
        LOGGER.warning('%d records are too few for a fit test', count)
        fit = FitResult(statistic=None, p_value=None, bins=0)
    return {
        'count': count,
        'seed': seed,
        'generator': GENERATOR_NAME,
        'frequency_a': in_a / count,
        'frequency_b': (count - in_a) / count,
        'probability_a': density.probability('a'),
        'probability_b': density.probability('b'),
        'chi_square': fit.statistic,
        'p_value': fit.p_value,
        'bins': fit.bins,
    }
