# coding=UTF-8
"""Near-region position and far-region momentum distributions."""
import dataclasses
import logging
import math

import numpy
import pandas
import scipy.integrate
import scipy.signal

from ramsey_localization import filters
from ramsey_localization import model

LOGGER = logging.getLogger(__name__)

# a single-point support still gets a window spanning a filter period
MIN_SUPPORT_WIDTH = math.pi / 2
EDGE_BAND_FRACTION = 1 / 64
MAX_EDGE_MASS = 1e-10
PEAK_THRESHOLD = 0.05
PEAK_MIN_SEPARATION = 2.0
DARK_FRINGE_FLOOR = 1e-3

DUAL = 'dual'
FIELD_ONLY = 'field_only'
POSITION_COLUMNS = ('p_a', 'p_b', 'pi_a', 'pi_b', 'envelope')
MOMENTUM_COLUMNS = ('p_a', 'p_b', 'pi_a', 'pi_b')


@dataclasses.dataclass(frozen=True, eq=False)
class Grid:
    """Uniform phase grid phi_j = center + (j - N/2)·spacing, N = 2^k."""

    phi: numpy.ndarray
    spacing: float

    @classmethod
    def from_window(cls, center, width, exponent):
        count = 2**exponent
        spacing = width / count
        phi = center + (numpy.arange(count) - count // 2) * spacing
        phi.flags.writeable = False
        return cls(phi=phi, spacing=spacing)

    @property
    def count(self):
        return len(self.phi)

    @property
    def q_spacing(self):
        return 2 * math.pi / (self.count * self.spacing)

    @property
    def q(self):
        """Conjugate momentum lattice in ħk₀ units, ascending."""
        return numpy.fft.fftshift(
            2 * math.pi * numpy.fft.fftfreq(self.count, self.spacing))


def make_grid(
        spec, exponent=model.DEFAULT_GRID_EXPONENT,
        padding=model.DEFAULT_PADDING):
    """Grid covering ``spec``'s support padded by ``padding`` widths a side."""
    lo, hi = spec.support()
    width = max(hi - lo, MIN_SUPPORT_WIDTH)
    return Grid.from_window(
        0.5 * (lo + hi), width * (1 + 2 * padding), exponent)


@dataclasses.dataclass(frozen=True, eq=False)
class DistributionTable:
    """Sampled densities per outcome branch on a position or momentum axis.

    Attributes:
        axis_name (str): ``phi`` or ``q``.
        axis (numpy.ndarray): ascending axis samples.
        columns (dict): column name -> density samples.
        probabilities (dict): column name -> integrated mass.
        mode (str): ``dual`` or ``field_only``.
    """

    axis_name: str
    axis: numpy.ndarray
    columns: dict
    probabilities: dict
    mode: str

    @property
    def spacing(self):
        return float(self.axis[1] - self.axis[0])

    def __getitem__(self, column):
        return self.columns[column]

    def to_frame(self):
        frame = pandas.DataFrame({self.axis_name: self.axis})
        order = (POSITION_COLUMNS if self.axis_name == 'phi'
                 else MOMENTUM_COLUMNS)
        for column in order:
            if column in self.columns:
                frame[column] = self.columns[column]
        return frame


def _branch_columns(cfg):
    return ('p_a', 'p_b') if cfg.ramsey_on else ('pi_a', 'pi_b')


def _mode(cfg):
    return DUAL if cfg.ramsey_on else FIELD_ONLY


def position_distribution(wp, cfg):
    """Conditional position densities |f·amp_s|² for outcome ``cfg.chi0``.

    Parameters:
        wp (model.AmplitudeField): normalized initial amplitude.
        cfg (model.InteractionConfig): interaction and readout.

    Returns:
        DistributionTable on the phi axis with the two branch columns of the
        active mode plus ``envelope`` = |f|²c_w²D², the field-only envelope.
    """
    phi = wp.phi
    density = wp.density()
    amp_a, amp_b = filters.branch_amplitudes(phi, cfg)
    name_a, name_b = _branch_columns(cfg)
    columns = {
        name_a: density * numpy.abs(amp_a)**2,
        name_b: density * numpy.abs(amp_b)**2,
        'envelope': density * filters.COMMON_WEIGHT**2 * (
            filters.envelope_filter(phi, cfg)),
    }
    probabilities = {
        name: model.trapezoid_mass(values, phi)
        for name, values in columns.items()}
    return DistributionTable(
        axis_name='phi', axis=phi, columns=columns,
        probabilities=probabilities, mode=_mode(cfg))


def momentum_amplitude(grid, values):
    """ψ̃(q) = (2π)^(-1/2) Σ_j ψ_j e^{-iqφ_j} dφ on the conjugate lattice.

    Returns:
        (q, spectrum) both in ascending q order.
    """
    q = 2 * math.pi * numpy.fft.fftfreq(grid.count, grid.spacing)
    spectrum = numpy.fft.fft(values) * grid.spacing / math.sqrt(2 * math.pi)
    spectrum *= numpy.exp(-1j * q * grid.phi[0])
    return numpy.fft.fftshift(q), numpy.fft.fftshift(spectrum)


def _check_edge_mass(grid, values, column):
    density = numpy.abs(values)**2
    total = density.sum()
    if total == 0:
        return
    band = max(1, int(grid.count * EDGE_BAND_FRACTION))
    edge_mass = (density[:band].sum() + density[-band:].sum()) / total
    if edge_mass > MAX_EDGE_MASS:
        LOGGER.error(
            '%s amplitude reaches the grid edge (edge mass %g)', column,
            edge_mass)
        raise model.PaddingError(
            f'{column} amplitude is not padded enough for the momentum '
            f'transform; raise grid.padding', edge_mass)


def momentum_distribution(wp, cfg):
    """Momentum densities of the conditioned amplitudes f·amp_s.

    The transform keeps the phases of the filters, so the dipole-force
    kicks carried by Δ show up as displaced momentum peaks.

    Returns:
        DistributionTable on the q axis (ħk₀ units). Probabilities are
        Σ density·dq and match the position-space branch masses (Parseval).

    Raises:
        PaddingError when a conditioned amplitude carries more than
        ``MAX_EDGE_MASS`` of its mass at the window edges.
    """
    grid = wp.grid
    amp_a, amp_b = filters.branch_amplitudes(wp.phi, cfg)
    columns = {}
    q = grid.q
    for column, amplitude in zip(_branch_columns(cfg), (amp_a, amp_b)):
        conditioned = wp.values * amplitude
        _check_edge_mass(grid, conditioned, column)
        q, spectrum = momentum_amplitude(grid, conditioned)
        columns[column] = numpy.abs(spectrum)**2
    dq = grid.q_spacing
    probabilities = {
        name: float(values.sum() * dq) for name, values in columns.items()}
    return DistributionTable(
        axis_name='q', axis=q, columns=columns,
        probabilities=probabilities, mode=_mode(cfg))


def _windowed(table, column, window):
    axis = table.axis
    values = table[column]
    if window is not None:
        lo, hi = window
        mask = (axis >= lo) & (axis < hi)
        axis = axis[mask]
        values = values[mask]
    mass = model.trapezoid_mass(values, axis) if len(axis) > 1 else 0.0
    if not mass > 0:
        raise ValueError(
            f'column {column} has no mass in window {window}')
    return axis, values, mass


def _spread(axis, values, mass):
    mean = model.trapezoid_mass(values * axis, axis) / mass
    variance = model.trapezoid_mass(values * (axis - mean)**2, axis) / mass
    return mean, math.sqrt(max(variance, 0.0))


def localization_width(table, branch, window=None):
    """Standard deviation of the axis under a column, renormalized.

    Parameters:
        table (DistributionTable): source densities.
        branch (str): column name, e.g. ``p_a`` or ``envelope``.
        window (tuple): half-open (lo, hi) restriction, or None for all.

    Raises:
        ValueError if the column has no mass inside the window.
    """
    axis, values, mass = _windowed(table, branch, window)
    return _spread(axis, values, mass)[1]


def lobe_width(table, branch, window=None, floor=DARK_FRINGE_FLOOR):
    """RMS width of the individual fringes of a column.

    The windowed density is cut at dark fringes (local minima no higher than
    ``floor`` times the maximum) and the within-fringe variances are averaged
    with the fringe masses as weights.
    """
    axis, values, _ = _windowed(table, branch, window)
    interior = numpy.arange(1, len(values) - 1)
    dark = interior[
        (values[interior] <= values[interior - 1]) &
        (values[interior] <= values[interior + 1]) &
        (values[interior] <= floor * values.max())]
    bounds = numpy.concatenate(([0], dark, [len(values) - 1]))
    total_mass = 0.0
    total_variance = 0.0
    for start, stop in zip(bounds[:-1], bounds[1:]):
        lobe_axis = axis[start:stop + 1]
        lobe_values = values[start:stop + 1]
        if len(lobe_axis) < 2:
            continue
        mass = model.trapezoid_mass(lobe_values, lobe_axis)
        if not mass > 0:
            continue
        _, width = _spread(lobe_axis, lobe_values, mass)
        total_mass += mass
        total_variance += mass * width**2
    if not total_mass > 0:
        raise ValueError(f'column {branch} has no fringe with mass')
    return math.sqrt(total_variance / total_mass)


def axis_moments(table, column):
    """(mean, standard deviation) of the axis under ``column``."""
    axis, values, mass = _windowed(table, column, None)
    return _spread(axis, values, mass)


def branch_probability(wp, cfg, branch):
    """Born weight ∫|f·amp_s|²dφ of final state ``branch`` ('a' or 'b').

    In dual mode P(a|χ₀) + P(b|χ₀) is the density of the outcome χ₀.
    """
    if branch not in ('a', 'b'):
        raise ValueError(f"branch must be 'a' or 'b', got {branch!r}")
    amp_a, amp_b = filters.branch_amplitudes(wp.phi, cfg)
    amplitude = amp_a if branch == 'a' else amp_b
    return model.trapezoid_mass(
        wp.density() * numpy.abs(amplitude)**2, wp.phi)


def peak_positions(
        table, column, threshold=PEAK_THRESHOLD,
        min_separation=PEAK_MIN_SEPARATION):
    """Axis positions of local maxima above ``threshold`` × global max.

    Maxima closer than ``min_separation`` to a higher one are dropped, which
    discards the sinc side lobes of a finite support.
    """
    values = table[column]
    distance = max(1, int(round(min_separation / table.spacing)))
    indices, _ = scipy.signal.find_peaks(
        values, height=threshold * values.max(), distance=distance)
    return table.axis[indices]


def comb_spacing(table, column, **peak_kwargs):
    """Median gap between consecutive peaks of ``column``."""
    peaks = peak_positions(table, column, **peak_kwargs)
    if len(peaks) < 2:
        raise ValueError(f'column {column} has fewer than two peaks')
    return float(numpy.median(numpy.diff(peaks)))


def dominant_peak(table, column):
    """Axis position of the global maximum of ``column``."""
    return float(table.axis[numpy.argmax(table[column])])


def uniform_density_table(axis, density, axis_name='phi'):
    """Wrap a bare density array as a one-column table named ``density``."""
    axis = numpy.asarray(axis, dtype=float)
    density = numpy.asarray(density, dtype=float)
    return DistributionTable(
        axis_name=axis_name, axis=axis, columns={'density': density},
        probabilities={
            'density': float(scipy.integrate.trapezoid(density, axis))},
        mode='')
