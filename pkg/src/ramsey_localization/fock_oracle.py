# coding=UTF-8
"""Truncated photon-number-basis evolution used as an independent oracle.

Nothing here uses the closed forms of ``filters``: coherent states are built
coefficient by coefficient, rotated with e^{inθ}, and projected onto quadrature
eigenvectors obtained from the Hermite-function recursion.
"""
import dataclasses
import logging
import math

import numpy
import scipy.integrate

from ramsey_localization import model

LOGGER = logging.getLogger(__name__)

MIN_N_MAX = 80
TRUNCATION_GUARD = 4.0
TRUNCATION_TOLERANCE = 1e-12
# e^{-χ²/4} underflows double precision past |χ| ≈ 53
CHI_LIMIT = 50.0
COMPLETENESS_POINTS = 4001
COMPLETENESS_MARGIN = 8.0


@dataclasses.dataclass(frozen=True, eq=False)
class FockState:
    """Coefficients c_n, n = 0..n_max, of a truncated field state."""

    coeffs: numpy.ndarray
    truncation_loss: float = 0.0

    @property
    def n_max(self):
        return len(self.coeffs) - 1

    def norm_squared(self):
        return float(numpy.vdot(self.coeffs, self.coeffs).real)

    def mean_photon_number(self):
        n = numpy.arange(len(self.coeffs))
        return float(numpy.sum(n * numpy.abs(self.coeffs)**2))

    def inner(self, other):
        """<self|other>."""
        return complex(numpy.vdot(self.coeffs, other.coeffs))

    def scaled(self, weight):
        return _frozen_state(weight * self.coeffs, self.truncation_loss)

    def __add__(self, other):
        return _frozen_state(
            self.coeffs + other.coeffs,
            max(self.truncation_loss, other.truncation_loss))

    def __sub__(self, other):
        return self + other.scaled(-1)


def _frozen_state(coeffs, truncation_loss=0.0):
    coeffs = numpy.array(coeffs, dtype=complex)
    coeffs.flags.writeable = False
    return FockState(coeffs=coeffs, truncation_loss=truncation_loss)


def default_n_max(alpha):
    """Cutoff generous enough for the Poisson tail of |α|² photons."""
    alpha = abs(alpha)
    return max(
        MIN_N_MAX,
        int(math.ceil(alpha**2 + 10 * alpha * math.sqrt(TRUNCATION_GUARD))))


def coherent_state(alpha, n_max, tolerance=TRUNCATION_TOLERANCE):
    """Truncated coherent state |α> by the recursion c_n = c_{n-1} α/√n.

    Parameters:
        alpha (complex): coherent amplitude.
        n_max (int): highest photon number kept, at least 1.
        tolerance (float): largest acceptable lost probability.

    Returns:
        FockState with ``truncation_loss`` = 1 - Σ|c_n|².

    Raises:
        ValueError if n_max < 1, TruncationError if the loss exceeds
        ``tolerance``.
    """
    if n_max < 1:
        raise ValueError(f'n_max must be >= 1, got {n_max}')
    alpha = complex(alpha)
    coeffs = numpy.empty(n_max + 1, dtype=complex)
    coeffs[0] = math.exp(-abs(alpha)**2 / 2)
    for n in range(1, n_max + 1):
        coeffs[n] = coeffs[n - 1] * alpha / math.sqrt(n)
    loss = max(0.0, 1.0 - float(numpy.sum(numpy.abs(coeffs)**2)))
    if loss > tolerance:
        LOGGER.error(
            'coherent state alpha=%s truncated at n_max=%d loses %g',
            alpha, n_max, loss)
        raise model.TruncationError(
            f'n_max={n_max} too small for alpha={alpha}', loss)
    return _frozen_state(coeffs, loss)


def phase_rotate(state, angle):
    """Apply e^{i·angle·a†a}: c_n -> e^{i n angle} c_n."""
    n = numpy.arange(len(state.coeffs))
    return _frozen_state(
        state.coeffs * numpy.exp(1j * angle * n), state.truncation_loss)


def hermite_functions(chi, n_max):
    """Components <n|χ> of the X = a + a† eigenbasis, shape (n_max+1, ...).

    Normalized-function recursion
    √(n+1) h_{n+1} = χ h_n - √n h_{n-1},  h_0 = (2π)^(-1/4) e^{-χ²/4},
    which keeps every term O(1) where raw Hermite polynomials overflow.
    """
    chi = numpy.asarray(chi, dtype=float)
    if numpy.any(numpy.abs(chi) > CHI_LIMIT):
        raise model.RangeError(
            f'quadrature value beyond |chi| <= {CHI_LIMIT}: the ground '
            f'function underflows; shift the chi grid or rescale alpha')
    table = numpy.empty((n_max + 1,) + chi.shape)
    table[0] = (2 * math.pi)**-0.25 * numpy.exp(-chi**2 / 4)
    if n_max >= 1:
        table[1] = chi * table[0]
    for n in range(1, n_max):
        table[n + 1] = (
            chi * table[n] - math.sqrt(n) * table[n - 1]) / math.sqrt(n + 1)
    return table


def quadrature_vector(chi, theta, n_max):
    """Eigenvector |χ_θ> of X_θ = a e^{-iθ} + a† e^{iθ}.

    The ket components are e^{inθ} h_n(χ), so the bra <χ_θ| used in
    projections carries e^{-inθ}. Delta-normalized: <χ|χ'> = δ(χ - χ').
    """
    n = numpy.arange(n_max + 1)
    components = hermite_functions(float(chi), n_max)
    return _frozen_state(components * numpy.exp(1j * n * theta))


def quadrature_operator(theta, n_max):
    """Tridiagonal matrix of X_θ in the truncated number basis."""
    off_diagonal = numpy.sqrt(numpy.arange(1, n_max + 1))
    lowering = numpy.diag(off_diagonal, k=1)
    return (lowering * numpy.exp(-1j * theta) +
            lowering.T * numpy.exp(1j * theta))


def quadrature_kernel(chi, chi_prime, n_max):
    """Truncated <χ|χ'> = Σ_n h_n(χ) h_n(χ') on an array of χ'."""
    row = hermite_functions(float(chi), n_max)
    return numpy.tensordot(row, hermite_functions(chi_prime, n_max), axes=1)


def simulate_final(phi, cfg, include_second_pulse=None, n_max=None):
    """Field branch attached to each internal state after the interaction.

    Parameters:
        phi (float): atomic position as standing-wave phase.
        cfg (InteractionConfig): interaction parameters.
        include_second_pulse (bool): apply the closing π/2 pulse; defaults to
            ``cfg.ramsey_on``.
        n_max (int): photon-number cutoff, ``default_n_max`` if None.

    Returns:
        dict {'a': FockState, 'b': FockState}. Without the second pulse the
        branches are C_a|α e^{iGτ sin²φ}> and C_b|α e^{-iGτ sin²φ}>; with it
        the pulse |a> -> (|a>+|b>)/√2, |b> -> (-|a>+|b>)/√2 mixes them.
    """
    if include_second_pulse is None:
        include_second_pulse = cfg.ramsey_on
    if n_max is None:
        n_max = default_n_max(cfg.alpha)
    field = coherent_state(cfg.alpha, n_max)
    angle = cfg.g_tau * math.sin(phi)**2
    branch_a = phase_rotate(field, angle).scaled(cfg.c_a)
    branch_b = phase_rotate(field, -angle).scaled(cfg.c_b)
    if not include_second_pulse:
        return {'a': branch_a, 'b': branch_b}
    root_half = 1 / math.sqrt(2)
    return {
        'a': (branch_a - branch_b).scaled(root_half),
        'b': (branch_a + branch_b).scaled(root_half),
    }


def project(branches, chi, theta, n_max):
    """<χ_θ|branch> for every branch of ``branches``."""
    bra = quadrature_vector(chi, theta, n_max)
    return {state: bra.inner(branch) for state, branch in branches.items()}


def oracle_amplitudes(phi, cfg, n_max=None):
    """Born amplitudes (amp_a, amp_b) for outcome ``cfg.chi0``.

    With Ramsey fields on this projects the entangled final state. With them
    off it projects the evolution of an atom held definitely in a, then in b,
    matching ``filters.single_amplitudes``.
    """
    if n_max is None:
        n_max = default_n_max(cfg.alpha)
    if cfg.ramsey_on:
        amplitudes = project(
            simulate_final(phi, cfg, True, n_max), cfg.chi0, cfg.theta,
            n_max)
        return amplitudes['a'], amplitudes['b']
    held_a = cfg.replace(c_a=1.0, c_b=0.0)
    held_b = cfg.replace(c_a=0.0, c_b=1.0)
    amp_a = project(
        simulate_final(phi, held_a, False, n_max), cfg.chi0, cfg.theta,
        n_max)['a']
    amp_b = project(
        simulate_final(phi, held_b, False, n_max), cfg.chi0, cfg.theta,
        n_max)['b']
    return amp_a, amp_b


def oracle_overlap(alpha, eta, theta, chi, n_max=None):
    """<χ_θ|α e^{iη}> through the number basis, vectorized over ``chi``."""
    if n_max is None:
        n_max = default_n_max(alpha)
    field = phase_rotate(coherent_state(alpha, n_max), eta)
    n = numpy.arange(n_max + 1)
    bra = numpy.conj(numpy.exp(1j * n * theta))[:, None] * (
        hermite_functions(numpy.atleast_1d(chi), n_max))
    result = numpy.tensordot(field.coeffs, bra, axes=(0, 0))
    if numpy.ndim(chi) == 0:
        return complex(result[0])
    return result


def outcome_completeness(alpha, eta=0.0, theta=0.0, n_max=None):
    """∫|<χ_θ|α e^{iη}>|² dχ by the trapezoid rule over a wide χ window."""
    reach = 2 * abs(alpha) + COMPLETENESS_MARGIN
    chi = numpy.linspace(-reach, reach, COMPLETENESS_POINTS)
    density = numpy.abs(oracle_overlap(alpha, eta, theta, chi, n_max))**2
    return float(scipy.integrate.trapezoid(density, chi))
