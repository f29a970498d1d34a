# coding=UTF-8
"""Closed-form vs oracle lattice and structural checks run by ``validate``."""
import dataclasses
import logging
import math
import time

import numpy

from ramsey_localization import distributions
from ramsey_localization import filters
from ramsey_localization import fock_oracle
from ramsey_localization import mechanics
from ramsey_localization import model
from ramsey_localization import sampler

LOGGER = logging.getLogger(__name__)

RELATIVE_TOLERANCE = 1e-8
# Born amplitudes can be exponentially small
ABSOLUTE_FLOOR = 1e-12
IDENTITY_TOLERANCE = 1e-12
MIXTURE_TOLERANCE = 1e-9
VALIDATION_SEED = 20240501
VALIDATION_GRID_EXPONENT = 13
ORACLE_TUPLES = 100
GENERALIZED_TUPLES = 50
MECHANICS_PAIRS = 50
SAMPLE_COUNT = 100000
MIN_P_VALUE = 0.01
MIDWAY_PEAK = 16.2
PEAK_TOLERANCE = 0.5
POINT_IMPULSE = 19.63


@dataclasses.dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _close(actual, expected):
    """Largest violation of |actual - expected| <= rtol·|expected| + floor."""
    actual = numpy.asarray(actual)
    expected = numpy.asarray(expected)
    excess = numpy.abs(actual - expected) - (
        RELATIVE_TOLERANCE * numpy.abs(expected) + ABSOLUTE_FLOOR)
    return float(numpy.max(excess))


def _random_config(rng, theta=0.0):
    alpha = rng.uniform(0.5, 3.0)
    phase = rng.uniform(0, 2 * math.pi)
    weight = rng.uniform(0.1, 0.9)
    return model.InteractionConfig(
        g_tau=rng.uniform(0.5, 2 * math.pi), alpha=alpha, theta=theta,
        chi0=rng.uniform(-2 * alpha - 2, 2 * alpha + 2),
        c_a=math.sqrt(weight),
        c_b=math.sqrt(1 - weight) * complex(math.cos(phase), math.sin(phase)))


def check_oracle_amplitudes(rng):
    """Dual and single amplitudes at θ = 0 against the Fock oracle."""
    worst = -numpy.inf
    for _ in range(ORACLE_TUPLES):
        cfg = _random_config(rng)
        phi = rng.uniform(0, math.pi)
        for ramsey_on in (True, False):
            mode_cfg = cfg.replace(ramsey_on=ramsey_on)
            closed = filters.branch_amplitudes(phi, mode_cfg)
            oracle = fock_oracle.oracle_amplitudes(phi, mode_cfg)
            worst = max(worst, _close(closed, oracle))
    return worst <= 0, f'worst excess over tolerance {worst:.3e}'


def check_oracle_generalized(rng):
    """Generalized-θ filters against the Fock oracle."""
    worst = -numpy.inf
    for _ in range(GENERALIZED_TUPLES):
        cfg = _random_config(rng, theta=rng.uniform(0, 2 * math.pi))
        phi = rng.uniform(0, math.pi)
        for ramsey_on in (True, False):
            mode_cfg = cfg.replace(ramsey_on=ramsey_on)
            sample = filters.generalized_filter(phi, mode_cfg)
            oracle = fock_oracle.oracle_amplitudes(phi, mode_cfg)
            worst = max(worst, _close((sample.amp_a, sample.amp_b), oracle))
    return worst <= 0, f'worst excess over tolerance {worst:.3e}'


def check_overlap_lattice(_rng):
    """Overlap closed form vs Hermite eigenvectors on a 21×21×11 lattice."""
    alpha = model.DEFAULT_ALPHA
    chi = numpy.linspace(-2 * alpha - 3, 2 * alpha + 3, 21)
    worst = -numpy.inf
    for eta in numpy.linspace(0, 2 * math.pi, 21, endpoint=False):
        for theta in numpy.linspace(0, 2 * math.pi, 11, endpoint=False):
            closed = filters.quadrature_overlap(alpha, eta, theta, chi)
            oracle = fock_oracle.oracle_overlap(alpha, eta, theta, chi)
            worst = max(worst, _close(closed, oracle))
    return worst <= 0, f'worst excess over tolerance {worst:.3e}'


def check_completeness(_rng):
    """∫|<χ_θ|α e^{iη}>|² dχ = 1."""
    worst = 0.0
    for eta, theta in ((0.0, 0.0), (1.0, 0.0), (0.3, 2.0), (math.pi, 0.5)):
        mass = fock_oracle.outcome_completeness(
            model.DEFAULT_ALPHA, eta, theta)
        worst = max(worst, abs(mass - 1))
    return worst <= 1e-8, f'largest completeness defect {worst:.3e}'


def _period_table(cfg, count=4096):
    phi = numpy.linspace(0, math.pi / 2, count, endpoint=False)
    d_squared = filters.amplitude_filter(phi, cfg)**2
    i_a, i_b = filters.interference_filters(phi, cfg)
    f_a = d_squared * numpy.abs(i_a)**2
    f_b = d_squared * numpy.abs(i_b)**2
    return phi, d_squared, f_a, f_b


def check_filter_structure(_rng):
    """Partition, periodicity, dark fringes and widths of the χ₀ = 0 filters."""
    cfg = model.InteractionConfig()
    phi, d_squared, f_a, f_b = _period_table(cfg)
    partition = float(numpy.max(numpy.abs(f_a + f_b - d_squared)))

    shifted = phi + math.pi / 2
    d_shift = filters.amplitude_filter(shifted, cfg)**2
    i_a_shift, i_b_shift = filters.interference_filters(shifted, cfg)
    periodicity = max(
        float(numpy.max(numpy.abs(d_shift * numpy.abs(i_a_shift)**2 - f_a))),
        float(numpy.max(numpy.abs(d_shift * numpy.abs(i_b_shift)**2 - f_b))))

    nodes = numpy.array([0, math.pi / 4, math.pi / 2])
    node_a = filters.amplitude_filter(nodes, cfg)**2 * numpy.abs(
        filters.interference_filters(nodes, cfg)[0])**2
    dark = float(numpy.max(node_a))

    widths = {}
    lobes = {}
    for name, values in (('d2', d_squared), ('f_a', f_a), ('f_b', f_b)):
        table = distributions.uniform_density_table(phi, values)
        widths[name] = distributions.localization_width(table, 'density')
        lobes[name] = distributions.lobe_width(table, 'density')
    passed = (
        partition <= IDENTITY_TOLERANCE and
        periodicity <= IDENTITY_TOLERANCE and
        dark <= IDENTITY_TOLERANCE and
        widths['f_b'] < widths['d2'] and
        lobes['f_a'] < lobes['d2'] and lobes['f_b'] < lobes['d2'])
    return passed, (
        f'partition {partition:.2e}, periodicity {periodicity:.2e}, '
        f'dark fringe {dark:.2e}, widths {widths}, lobe widths {lobes}')


def flat_top_comb_wavepacket(exponent=VALIDATION_GRID_EXPONENT):
    """Flat top over φ ∈ [-π, π], i.e. |x/λ| <= 1 under ``paper-figure``."""
    spec = model.WavepacketSpec.flat_top(math.pi)
    return model.build_wavepacket(
        spec, distributions.make_grid(spec, exponent))


def midway_gaussian_wavepacket(exponent=VALIDATION_GRID_EXPONENT):
    """Gaussian midway between node and antinode, σ = 0.1π."""
    spec = model.WavepacketSpec.gaussian(math.pi / 4, 0.1 * math.pi)
    return model.build_wavepacket(
        spec, distributions.make_grid(spec, exponent))


def check_momentum_comb(_rng):
    """Comb spacing, interleaving and the mixture identity."""
    wp = flat_top_comb_wavepacket()
    cfg = model.InteractionConfig()
    dual = distributions.momentum_distribution(wp, cfg)
    field_only = distributions.momentum_distribution(
        wp, cfg.replace(ramsey_on=False))
    dq = dual.spacing
    spacings = [distributions.comb_spacing(dual, column)
                for column in ('p_a', 'p_b')]
    peaks_a = distributions.peak_positions(dual, 'p_a')
    peaks_b = distributions.peak_positions(dual, 'p_b')
    gaps = numpy.min(numpy.abs(peaks_a[:, None] - peaks_b[None, :]), axis=1)
    interleaved = bool(numpy.all(gaps > 1.0))
    mixture = (abs(cfg.c_a)**2 * field_only['pi_a'] +
               abs(cfg.c_b)**2 * field_only['pi_b'])
    scale = float(numpy.max(mixture))
    residual = float(numpy.max(numpy.abs(
        dual['p_a'] + dual['p_b'] - mixture))) / scale
    passed = (
        all(abs(spacing - 4) <= dq for spacing in spacings) and
        interleaved and residual <= MIXTURE_TOLERANCE)
    return passed, (
        f'comb spacings {spacings} (bin {dq:.3f}), interleaved '
        f'{interleaved}, mixture residual {residual:.2e}')


def check_impulse_peak(_rng):
    """Dominant field-only momentum peaks of the midway Gaussian."""
    wp = midway_gaussian_wavepacket()
    cfg = model.InteractionConfig(ramsey_on=False)
    table = distributions.momentum_distribution(wp, cfg)
    peak_a = distributions.dominant_peak(table, 'pi_a')
    peak_b = distributions.dominant_peak(table, 'pi_b')
    impulse = float(mechanics.transferred_momentum(math.pi / 4, cfg, 'a'))
    passed = (
        abs(peak_a - MIDWAY_PEAK) <= PEAK_TOLERANCE and
        abs(peak_b + MIDWAY_PEAK) <= PEAK_TOLERANCE and
        abs(impulse - POINT_IMPULSE) <= 0.01)
    return passed, (
        f'peaks {peak_a:.3f} / {peak_b:.3f}, point impulse {impulse:.4f}')


def check_parseval(_rng):
    """Branch probabilities agree between position and momentum space."""
    wp = flat_top_comb_wavepacket()
    worst = 0.0
    for ramsey_on in (True, False):
        cfg = model.InteractionConfig(ramsey_on=ramsey_on)
        position = distributions.position_distribution(wp, cfg)
        momentum = distributions.momentum_distribution(wp, cfg)
        for column in momentum.columns:
            worst = max(worst, abs(
                position.probabilities[column] -
                momentum.probabilities[column]))
    return worst <= MIXTURE_TOLERANCE, f'largest mismatch {worst:.2e}'


def check_mechanics(rng):
    """Quadrature vs closed form, small-σ order and midway elimination."""
    cfg = model.InteractionConfig()
    worst = 0.0
    for _ in range(MECHANICS_PAIRS):
        phi0 = rng.uniform(0, math.pi)
        sigma = rng.uniform(0.05, 0.5)
        wp = mechanics.gaussian_wavepacket(
            phi0, sigma, 12, model.DEFAULT_PADDING)
        numeric = mechanics.dpt_numeric(wp.phi, wp.density(), cfg)
        closed = mechanics.dpt_closed(phi0, sigma, cfg)
        worst = max(worst, abs(numeric - closed) / closed)

    phi0 = 0.3
    errors = [
        abs(mechanics.dpt_small_sigma(phi0, sigma, cfg) /
            mechanics.dpt_closed(phi0, sigma, cfg) - 1)
        for sigma in (0.02, 0.01, 0.005)]
    orders = [math.log2(errors[i] / errors[i + 1]) for i in range(2)]
    eliminated = mechanics.dpt_closed(math.pi / 4, 0.05, cfg) < (
        0.01 * cfg.g_tau * cfg.alpha**2)
    passed = (
        worst <= 1e-10 and all(abs(order - 2) <= 0.2 for order in orders)
        and eliminated)
    return passed, (
        f'worst relative gap {worst:.2e}, small-sigma orders {orders}, '
        f'midway eliminated {eliminated}')


def check_superposed_spread(_rng):
    """Dual superposed spread exceeds the field-only definite-state one."""
    wp = midway_gaussian_wavepacket()
    cfg = model.InteractionConfig()
    report = mechanics.popper_report(
        [('dual', cfg), ('field_only', cfg.replace(ramsey_on=False))], wp)
    dual, field_only = report['configurations']
    passed = dual['mechanical_spread'] > field_only['mechanical_spread']
    return passed, (
        f"dual {dual['mechanical_spread']:.4f} vs field-only "
        f"{field_only['mechanical_spread']:.4f}")


def check_sampler(_rng):
    """Goodness of fit, node-spike outcomes and seed determinism."""
    cfg = model.InteractionConfig()
    wp = flat_top_comb_wavepacket(12)
    density = sampler.outcome_density(wp, cfg)
    records = sampler.sample_records(wp, cfg, SAMPLE_COUNT, VALIDATION_SEED)
    fit = sampler.goodness_of_fit([record.chi for record in records], density)

    spike = model.WavepacketSpec.tabulated([0.0], [1.0])
    spike_wp = model.build_wavepacket(
        spike, distributions.make_grid(spike, 12))
    spike_records = sampler.sample_records(spike_wp, cfg, 1000, 42)
    all_b = all(record.state == 'b' for record in spike_records)
    repeat = sampler.sample_records(spike_wp, cfg, 1000, 42)
    deterministic = repeat == spike_records
    passed = fit.p_value > MIN_P_VALUE and all_b and deterministic
    return passed, (
        f'p-value {fit.p_value:.3f} over {fit.bins} bins, node spike all b '
        f'{all_b}, deterministic {deterministic}')


CHECKS = (
    ('oracle_amplitudes', check_oracle_amplitudes),
    ('oracle_generalized', check_oracle_generalized),
    ('overlap_lattice', check_overlap_lattice),
    ('completeness', check_completeness),
    ('filter_structure', check_filter_structure),
    ('momentum_comb', check_momentum_comb),
    ('impulse_peak', check_impulse_peak),
    ('parseval', check_parseval),
    ('mechanics', check_mechanics),
    ('superposed_spread', check_superposed_spread),
    ('sampler', check_sampler),
)


def run_validation(seed=VALIDATION_SEED, names=None):
    """Run the named checks (all by default) and log one line each.

    Returns:
        list of CheckResult in ``CHECKS`` order. A check that raises a
        ``NumericalContractError`` is reported as failed.
    """
    rng = numpy.random.default_rng(seed)
    results = []
    for name, check in CHECKS:
        if names is not None and name not in names:
            continue
        start_time = time.time()
        try:
            passed, detail = check(rng)
        except model.NumericalContractError as error:
            passed, detail = False, f'{type(error).__name__}: {error}'
        elapsed = time.time() - start_time
        if passed:
            LOGGER.info('PASS %s (%.1fs): %s', name, elapsed, detail)
        else:
            LOGGER.error('FAIL %s (%.1fs): %s', name, elapsed, detail)
        results.append(CheckResult(name, bool(passed), detail))
    return results
