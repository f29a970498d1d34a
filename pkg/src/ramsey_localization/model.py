# coding=UTF-8
"""Configuration, unit conventions and regime checks for the localization model.

All core math runs on the dimensionless standing-wave phase φ = k₀x and
reports momenta in units of ħk₀. Positions quoted as x/λ are converted with a
``PositionConvention``.
"""
import dataclasses
import json
import logging
import math

import numpy
import scipy.integrate
import scipy.special

LOGGER = logging.getLogger(__name__)

DEFAULT_G_TAU = math.pi
DEFAULT_ALPHA = 2.5
DEFAULT_GRID_EXPONENT = 14
DEFAULT_PADDING = 4.0
DEFAULT_REGIME_MARGIN = 100.0
BALANCE_TOLERANCE = 1e-6
AMPLITUDE_NORM_TOLERANCE = 1e-12
# tail mass beyond 8 sigma of a Gaussian density is e^-32
GAUSSIAN_SUPPORT_SIGMAS = 8.0
MAX_TRUNCATED_MASS = 1e-10

FLAT_TOP = 'flat_top'
GAUSSIAN = 'gaussian'
TABULATED = 'tabulated'
WAVEPACKET_KINDS = (FLAT_TOP, GAUSSIAN, TABULATED)

PAPER_FIGURE = 'paper-figure'
STRICT_K0 = 'strict-k0'


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


class SignViolationError(ConfigError):
    """Detuning sign contrary to delta_a < 0 < delta_b."""


class NumericalContractError(RuntimeError):
    """A numerical precondition of a computation was violated."""


class TruncationError(NumericalContractError):
    def __init__(self, message, mass_lost):
        super().__init__(f'{message} (mass lost {mass_lost:.3e})')
        self.mass_lost = mass_lost


class PaddingError(NumericalContractError):
    def __init__(self, message, edge_mass):
        super().__init__(f'{message} (edge mass {edge_mass:.3e})')
        self.edge_mass = edge_mass


class MassDeficitError(NumericalContractError):
    def __init__(self, message, deficit):
        super().__init__(f'{message} (mass deficit {deficit:.3e})')
        self.deficit = deficit


class NormalizationError(NumericalContractError):
    pass


class RangeError(NumericalContractError):
    pass


class ValidationFailure(RuntimeError):
    """One or more validation checks failed."""


@dataclasses.dataclass(frozen=True)
class InteractionConfig:
    """Interaction and measurement parameters.

    Attributes:
        g_tau (float): pulse area G·τ of the light shift at the antinode.
        alpha (float): real coherent amplitude of the cavity field.
        theta (float): measured quadrature phase in [0, 2π).
        chi0 (float): measured quadrature outcome.
        c_a, c_b (complex): internal-state amplitudes entering the cavity.
        ramsey_on (bool): dual measurement if True, field-only otherwise.
    """

    g_tau: float = DEFAULT_G_TAU
    alpha: float = DEFAULT_ALPHA
    theta: float = 0.0
    chi0: float = 0.0
    c_a: complex = complex(1 / math.sqrt(2))
    c_b: complex = complex(1 / math.sqrt(2))
    ramsey_on: bool = True

    def __post_init__(self):
        for name in ('g_tau', 'alpha', 'theta', 'chi0'):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f'{name} must be finite')
        if self.alpha < 0:
            raise ConfigError(f'alpha must be >= 0, got {self.alpha}')
        if not 0 <= self.theta < 2 * math.pi:
            raise ConfigError(
                f'theta must lie in [0, 2pi), got {self.theta}')
        object.__setattr__(self, 'c_a', complex(self.c_a))
        object.__setattr__(self, 'c_b', complex(self.c_b))
        norm = abs(self.c_a)**2 + abs(self.c_b)**2
        if abs(norm - 1) > AMPLITUDE_NORM_TOLERANCE:
            raise ConfigError(
                f'|c_a|^2 + |c_b|^2 must be 1, got {norm!r}')

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass(frozen=True)
class PositionConvention:
    """Maps x/λ onto the standing-wave phase φ.

    ``paper-figure`` reads a plotted axis value u as φ = πu (node at 0,
    midway at 1/4, antinode at 1/2); ``strict-k0`` uses k₀ = 2π/λ.
    """

    name: str
    phase_per_wavelength: float

    def to_phase(self, value):
        return self.phase_per_wavelength * numpy.asarray(value, dtype=float)


CONVENTIONS = {
    PAPER_FIGURE: PositionConvention(PAPER_FIGURE, math.pi),
    STRICT_K0: PositionConvention(STRICT_K0, 2 * math.pi),
}


def get_convention(name):
    """Return the ``PositionConvention`` registered under ``name``."""
    try:
        return CONVENTIONS[name]
    except KeyError:
        raise ConfigError(
            f'unknown convention {name!r}, expected one of '
            f'{sorted(CONVENTIONS)}')


@dataclasses.dataclass(frozen=True)
class PhysicalRegime:
    """Atomic and cavity rates, all angular frequencies."""

    g_a: float
    g_b: float
    delta_a: float
    delta_b: float
    gamma_a: float
    gamma_b: float
    margin: float = DEFAULT_REGIME_MARGIN


@dataclasses.dataclass(frozen=True)
class ValidityReport:
    """Outcome of ``validate_regime``.

    Attributes:
        checks (dict): check name -> (passed, measured value, threshold).
        light_shift (float): G = g_b²/δ_b.
        interaction_time (float): τ implied by the configured G·τ.
    """

    checks: dict
    light_shift: float
    interaction_time: float

    @property
    def passed(self):
        return all(passed for passed, _, _ in self.checks.values())

    def failures(self):
        return [name for name, (passed, _, _) in self.checks.items()
                if not passed]


def validate_regime(regime, cfg):
    """Check the far-detuned, balanced-light-shift regime.

    Parameters:
        regime (PhysicalRegime): rates and detunings.
        cfg (InteractionConfig): used for the pulse area G·τ.

    Returns:
        ValidityReport with one entry per inequality.

    Raises:
        ConfigError on non-finite or non-positive rates,
        SignViolationError when delta_a >= 0 or delta_b <= 0.
    """
    values = dataclasses.asdict(regime)
    for name, value in values.items():
        if not math.isfinite(value):
            raise ConfigError(f'regime.{name} must be finite, got {value}')
    for name in ('g_a', 'g_b', 'gamma_a', 'gamma_b', 'margin'):
        if values[name] <= 0:
            raise ConfigError(
                f'regime.{name} must be positive, got {values[name]}')
    if regime.delta_a >= 0:
        raise SignViolationError(
            f'delta_a = omega_C - omega_ca must be negative, got '
            f'{regime.delta_a}')
    if regime.delta_b <= 0:
        raise SignViolationError(
            f'delta_b = omega_C - omega_cb must be positive, got '
            f'{regime.delta_b}')

    light_shift = regime.g_b**2 / regime.delta_b
    ratio_a = abs(regime.delta_a) / regime.gamma_a
    ratio_b = abs(regime.delta_b) / regime.gamma_b
    balance = abs(
        -regime.g_a**2 / regime.delta_a - light_shift) / light_shift
    checks = {
        'detuning_a': (ratio_a >= regime.margin, ratio_a, regime.margin),
        'detuning_b': (ratio_b >= regime.margin, ratio_b, regime.margin),
        'balance': (
            balance <= BALANCE_TOLERANCE, balance, BALANCE_TOLERANCE),
    }
    report = ValidityReport(
        checks=checks, light_shift=light_shift,
        interaction_time=cfg.g_tau / light_shift)
    for name, (passed, value, threshold) in checks.items():
        LOGGER.debug(
            'regime check %s: %s (value %g, threshold %g)', name,
            'pass' if passed else 'FAIL', value, threshold)
    return report


@dataclasses.dataclass(frozen=True)
class WavepacketSpec:
    """Initial position amplitude f(φ), parameters in phase units."""

    kind: str
    half_width: float = 0.0
    center: float = 0.0
    sigma: float = 0.0
    table_phi: tuple = ()
    table_amplitude: tuple = ()

    def __post_init__(self):
        if self.kind not in WAVEPACKET_KINDS:
            raise ConfigError(
                f'wavepacket kind {self.kind!r} not in {WAVEPACKET_KINDS}')
        if self.kind == FLAT_TOP and not self.half_width > 0:
            raise ConfigError('flat_top half_width must be positive')
        if self.kind == GAUSSIAN and not self.sigma > 0:
            raise ConfigError('gaussian sigma must be positive')
        if self.kind == TABULATED:
            if len(self.table_phi) == 0 or (
                    len(self.table_phi) != len(self.table_amplitude)):
                raise ConfigError(
                    'tabulated wavepacket needs matching, non-empty phi '
                    'and amplitude columns')

    @classmethod
    def flat_top(cls, half_width, center=0.0):
        return cls(FLAT_TOP, half_width=half_width, center=center)

    @classmethod
    def gaussian(cls, center, sigma):
        return cls(GAUSSIAN, center=center, sigma=sigma)

    @classmethod
    def tabulated(cls, phi, amplitude):
        return cls(
            TABULATED, table_phi=tuple(float(x) for x in phi),
            table_amplitude=tuple(complex(x) for x in amplitude))

    def support(self):
        """Return (lo, hi) of the interval carrying the wavepacket."""
        if self.kind == FLAT_TOP:
            return (self.center - self.half_width,
                    self.center + self.half_width)
        if self.kind == GAUSSIAN:
            reach = GAUSSIAN_SUPPORT_SIGMAS * self.sigma
            return (self.center - reach, self.center + reach)
        return (min(self.table_phi), max(self.table_phi))


@dataclasses.dataclass(frozen=True)
class AmplitudeField:
    """Complex position amplitude sampled on a grid, L²-normalized."""

    grid: object
    values: numpy.ndarray

    @property
    def phi(self):
        return self.grid.phi

    def density(self):
        return numpy.abs(self.values)**2


def trapezoid_mass(density, phi):
    """Trapezoidal integral of ``density`` over ``phi``."""
    return float(scipy.integrate.trapezoid(density, phi))


def _mass_outside(spec, lo, hi):
    """Analytic mass of the spec's density outside the window [lo, hi]."""
    if spec.kind == FLAT_TOP:
        s_lo, s_hi = spec.support()
        inside = max(0.0, min(hi, s_hi) - max(lo, s_lo))
        return 1.0 - inside / (s_hi - s_lo)
    if spec.kind == GAUSSIAN:
        # density of f is normal with standard deviation sigma
        scale = spec.sigma * math.sqrt(2)
        return float(
            0.5 * scipy.special.erfc((hi - spec.center) / scale) +
            0.5 * scipy.special.erfc((spec.center - lo) / scale))
    phi = numpy.array(spec.table_phi)
    weight = numpy.abs(numpy.array(spec.table_amplitude))**2
    total = weight.sum()
    if total == 0:
        raise ConfigError('tabulated wavepacket has zero amplitude')
    outside = (phi < lo) | (phi > hi)
    return float(weight[outside].sum() / total)


def build_wavepacket(spec, grid):
    """Sample ``spec`` on ``grid`` and normalize it.

    Parameters:
        spec (WavepacketSpec): the initial amplitude.
        grid (distributions.Grid): uniform phase grid.

    Returns:
        AmplitudeField whose density integrates to 1 (trapezoidal rule).

    Raises:
        TruncationError if more than ``MAX_TRUNCATED_MASS`` of the density
        lies outside the grid window.
    """
    phi = grid.phi
    lo, hi = float(phi[0]), float(phi[-1])
    mass_lost = _mass_outside(spec, lo, hi)
    if mass_lost > MAX_TRUNCATED_MASS:
        LOGGER.error(
            '%s wavepacket support %s exceeds grid window [%g, %g]',
            spec.kind, spec.support(), lo, hi)
        raise TruncationError(
            f'{spec.kind} wavepacket does not fit the grid window '
            f'[{lo:g}, {hi:g}]', mass_lost)

    if spec.kind == FLAT_TOP:
        # density is the fraction of each grid cell inside the support
        cover = numpy.clip(
            (spec.half_width + grid.spacing / 2 -
             numpy.abs(phi - spec.center)) / grid.spacing, 0.0, 1.0)
        values = numpy.sqrt(cover).astype(complex)
    elif spec.kind == GAUSSIAN:
        values = numpy.exp(
            -(phi - spec.center)**2 / (4 * spec.sigma**2)).astype(complex)
    else:
        table_phi = numpy.array(spec.table_phi)
        table_amp = numpy.array(spec.table_amplitude)
        if len(table_phi) == 1:
            values = numpy.zeros(phi.shape, dtype=complex)
            values[numpy.argmin(numpy.abs(phi - table_phi[0]))] = (
                table_amp[0])
        else:
            order = numpy.argsort(table_phi)
            table_phi = table_phi[order]
            table_amp = table_amp[order]
            values = (
                numpy.interp(phi, table_phi, table_amp.real,
                             left=0.0, right=0.0) +
                1j * numpy.interp(phi, table_phi, table_amp.imag,
                                  left=0.0, right=0.0))

    mass = trapezoid_mass(numpy.abs(values)**2, phi)
    if not mass > 0:
        raise TruncationError(
            f'{spec.kind} wavepacket has no mass on the grid', 1.0)
    values = values / math.sqrt(mass)
    values.flags.writeable = False
    return AmplitudeField(grid=grid, values=values)


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Resolved snapshot of a JSON run configuration."""

    interaction: InteractionConfig
    wavepacket: WavepacketSpec
    grid_exponent: int
    padding: float
    regime: object
    convention: PositionConvention
    document: dict


_SECTION_KEYS = {
    'interaction': {
        'g_tau', 'alpha', 'theta', 'chi0', 'c_a', 'c_b', 'ramsey_on'},
    'wavepacket': {
        'kind', 'units', 'half_width', 'center', 'sigma', 'phi',
        'amplitude_re', 'amplitude_im'},
    'grid': {'exponent', 'padding'},
    'regime': {
        'g_a', 'g_b', 'delta_a', 'delta_b', 'gamma_a', 'gamma_b', 'margin'},
}
_REGIME_REQUIRED = {
    'g_a', 'g_b', 'delta_a', 'delta_b', 'gamma_a', 'gamma_b'}


def _check_keys(section_name, section, allowed):
    if not isinstance(section, dict):
        raise ConfigError(f'{section_name} must be a JSON object')
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(
            f'unknown key(s) {unknown} in {section_name}; allowed keys are '
            f'{sorted(allowed)}')


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _parse_number(section_name, key, value):
    if not _is_number(value):
        raise ConfigError(
            f'{section_name}.{key} must be a number, got {value!r}')
    return float(value)


def _parse_amplitude(key, value):
    if _is_number(value):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2 and
            all(_is_number(x) for x in value)):
        return complex(value[0], value[1])
    raise ConfigError(
        f'interaction.{key} must be a number or a [re, im] pair, got '
        f'{value!r}')


def _parse_wavepacket(section, convention):
    kind = section.get('kind', FLAT_TOP)
    units = section.get('units', 'phase')
    if units == 'phase':
        scale = 1.0
    elif units == 'wavelength':
        scale = convention.phase_per_wavelength
    else:
        raise ConfigError(
            f"wavepacket.units must be 'phase' or 'wavelength', got "
            f'{units!r}')
    try:
        if kind == FLAT_TOP:
            return WavepacketSpec.flat_top(
                scale * float(section.get('half_width', 1.0)),
                center=scale * float(section.get('center', 0.0)))
        if kind == GAUSSIAN:
            return WavepacketSpec.gaussian(
                scale * float(section['center']),
                scale * float(section['sigma']))
        if kind == TABULATED:
            phi = [scale * float(x) for x in section['phi']]
            real = section['amplitude_re']
            imag = section.get('amplitude_im', [0.0] * len(real))
            if len(imag) != len(real):
                raise ConfigError(
                    'wavepacket.amplitude_im must match amplitude_re')
            return WavepacketSpec.tabulated(
                phi, [complex(re, im) for re, im in zip(real, imag)])
    except KeyError as missing:
        raise ConfigError(
            f'wavepacket of kind {kind!r} requires key {missing}')
    except (TypeError, ValueError) as error:
        if isinstance(error, ConfigError):
            raise
        raise ConfigError(f'bad wavepacket value: {error}')
    raise ConfigError(
        f'wavepacket kind {kind!r} not in {WAVEPACKET_KINDS}')


def parse_run_config(document, convention_name=PAPER_FIGURE):
    """Build a ``RunConfig`` from an already decoded JSON document.

    Parameters:
        document (dict): with optional keys ``interaction``, ``wavepacket``,
            ``grid``, ``regime``.
        convention_name (str): ``paper-figure`` or ``strict-k0``.

    Returns:
        RunConfig.

    Raises:
        ConfigError on unknown keys, bad values or violated invariants.
    """
    convention = get_convention(convention_name)
    _check_keys('config', document, set(_SECTION_KEYS))
    for section_name, allowed in _SECTION_KEYS.items():
        if section_name in document:
            _check_keys(section_name, document[section_name], allowed)

    interaction_doc = dict(document.get('interaction', {}))
    for key in ('c_a', 'c_b'):
        if key in interaction_doc:
            interaction_doc[key] = _parse_amplitude(
                key, interaction_doc[key])
    for key in ('g_tau', 'alpha', 'theta', 'chi0'):
        if key in interaction_doc:
            interaction_doc[key] = _parse_number(
                'interaction', key, interaction_doc[key])
    if not isinstance(interaction_doc.get('ramsey_on', True), bool):
        raise ConfigError(
            f'interaction.ramsey_on must be true or false, got '
            f'{interaction_doc["ramsey_on"]!r}')
    try:
        interaction = InteractionConfig(**interaction_doc)
    except TypeError as error:
        raise ConfigError(f'bad interaction section: {error}')

    wavepacket = _parse_wavepacket(
        document.get('wavepacket', {}), convention)

    grid_doc = document.get('grid', {})
    exponent = grid_doc.get('exponent', DEFAULT_GRID_EXPONENT)
    padding = grid_doc.get('padding', DEFAULT_PADDING)
    if not isinstance(exponent, int) or not 4 <= exponent <= 24:
        raise ConfigError(
            f'grid.exponent must be an integer in [4, 24], got {exponent!r}')
    if not _is_number(padding) or padding < 0:
        raise ConfigError(
            f'grid.padding must be a non-negative number, got {padding!r}')

    regime = None
    if 'regime' in document:
        regime_doc = document['regime']
        missing = sorted(_REGIME_REQUIRED - set(regime_doc))
        if missing:
            raise ConfigError(f'regime section is missing {missing}')
        regime = PhysicalRegime(**{
            key: _parse_number('regime', key, value)
            for key, value in regime_doc.items()})

    return RunConfig(
        interaction=interaction, wavepacket=wavepacket,
        grid_exponent=exponent, padding=float(padding), regime=regime,
        convention=convention, document=document)


def load_run_config(config_path, convention_name=PAPER_FIGURE):
    """Read a JSON run configuration from ``config_path``.

    Raises:
        ConfigError with line/column diagnostics on malformed JSON.
    """
    try:
        with open(config_path) as config_file:
            document = json.load(config_file)
    except json.JSONDecodeError as error:
        raise ConfigError(
            f'{config_path}: invalid JSON at line {error.lineno} column '
            f'{error.colno}: {error.msg}')
    except OSError as error:
        raise ConfigError(f'cannot read config {config_path}: {error}')
    LOGGER.debug('loaded config %s', config_path)
    return parse_run_config(document, convention_name)
