"""Mechanical and optomechanical susceptibilities and detuning response.

The cavity output field in the linearised regime is
``a_out = (B - C) x_m + D a_in + E a_l`` with the coefficients below; the
optomechanical susceptibility chi(omega, Delta) is the corresponding
pressure-to-quadrature transfer divided into its dispersive and
dissipative variants.  In the regime of interest the acoustic frequency
is far below the cavity linewidth, so a simplified omega << kappa form is
provided alongside the full expressions and the two are cross-checked in
the test suite.

Functions accept scalars or numpy arrays for ``omega`` and ``detuning``
and evaluate elementwise, which makes grid sweeps embarrassingly
parallel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import MechanicalMode, OpticalCavity, SpectrumSeries
from .errors import DegenerateModeError


class Coupling(Enum):
    """How mechanical displacement couples to the cavity."""

    DISPERSIVE = "dispersive"  # displacement shifts the cavity resonance
    DISSIPATIVE = "dissipative"  # displacement modulates the input coupling


def mech_susceptibility(mode: MechanicalMode, omega):
    """Mechanical susceptibility chi_m(omega) = 1 / (m (w_m^2 - w^2 - i gamma_m w)).

    Args:
        mode: mechanical mode (total damping gamma_m = gamma + gamma_gas).
        omega: drive frequency, rad/s (scalar or array).

    Returns:
        Complex susceptibility in m/N.

    Raises:
        DegenerateModeError: undamped mode driven exactly on resonance.
    """
    w = np.asarray(omega, dtype=float)
    gamma_m = mode.total_damping
    if gamma_m == 0.0 and np.any(np.isclose(w, mode.resonance_freq, rtol=0.0, atol=0.0)):
        raise DegenerateModeError("undamped susceptibility is singular at omega = omega_m")
    denom = mode.effective_mass * (
        mode.resonance_freq**2 - w.astype(complex) ** 2 - 1j * gamma_m * w
    )
    result = 1.0 / denom
    return result if result.ndim else complex(result)


@dataclass(frozen=True)
class OutputCoefficients:
    """Coefficients of the linearised cavity input-output relation.

    ``a_out = (B - C) x_m + D a_in + E a_l`` with B the dispersive and C
    the dissipative transduction term, D the input-field reflection and
    E the loss-port vacuum admixture.  For a passive cavity |D| <= 1.
    """

    B: complex
    C: complex
    D: complex
    E: complex


def output_coefficients(cavity: OpticalCavity, omega, detuning=None) -> OutputCoefficients:
    """Evaluate the input-output coefficients at drive frequency ``omega``.

    The input field amplitude is taken as sqrt(photon_number).
    """
    delta = cavity.detuning if detuning is None else detuning
    kappa_in = cavity.input_coupling
    kappa_l = cavity.intrinsic_loss
    kappa_0 = cavity.total_loss
    alpha_in = math.sqrt(cavity.photon_number)
    shifted = kappa_0 + 2j * (delta - omega)
    unshifted = kappa_0 + 2j * delta
    b = -2j * alpha_in * cavity.dispersive_coupling * kappa_in / (unshifted * shifted)
    c = (
        2.0
        * alpha_in
        * cavity.dissipative_coupling
        * kappa_in
        / shifted
        * (1.0 - 2.0 * kappa_in / unshifted)
    )
    d = (kappa_in - kappa_l - 2j * (delta - omega)) / shifted
    e = math.sqrt(kappa_in * kappa_l) / shifted
    return OutputCoefficients(B=complex(b), C=complex(c), D=complex(d), E=complex(e))


def om_susceptibility(cavity, mode, kind: Coupling, omega, detuning=None):
    """Full optomechanical susceptibility chi(omega, Delta).

    Dispersive:
        chi = 32 g_disp Delta kappa_in0 chi_m (kappa_0 - i w)
              / ((4 Delta^2 + kappa_0^2)(4 Delta^2 + (kappa_0 - 2 i w)^2))
    Dissipative:
        chi = 2 g_diss kappa_in0 (-kappa_0 (kappa_in0 - kappa_l)(kappa_0 - 2 i w)
              + 4 Delta^2 (kappa_0 + 2 kappa_in0 - 2 i w)) chi_m
              / (same denominator)
    """
    delta = cavity.detuning if detuning is None else detuning
    delta = np.asarray(delta, dtype=float)
    w = np.asarray(omega, dtype=float)
    kappa_in = cavity.input_coupling
    kappa_l = cavity.intrinsic_loss
    kappa_0 = cavity.total_loss
    chi_m = mech_susceptibility(mode, omega)
    denom = (4.0 * delta**2 + kappa_0**2) * (4.0 * delta**2 + (kappa_0 - 2j * w) ** 2)
    if kind is Coupling.DISPERSIVE:
        numer = 32.0 * cavity.dispersive_coupling * delta * kappa_in * (kappa_0 - 1j * w)
    elif kind is Coupling.DISSIPATIVE:
        numer = (
            2.0
            * cavity.dissipative_coupling
            * kappa_in
            * (
                -kappa_0 * (kappa_in - kappa_l) * (kappa_0 - 2j * w)
                + 4.0 * delta**2 * (kappa_0 + 2.0 * kappa_in - 2j * w)
            )
        )
    else:
        raise TypeError(f"unknown coupling kind: {kind!r}")
    result = numer * chi_m / denom
    return result if np.ndim(result) else complex(result)


def _lowfreq_detuning_weight(cavity, kind, delta):
    """Quasi-static optical part of the susceptibility, without chi_m."""
    kappa_in = cavity.input_coupling
    kappa_l = cavity.intrinsic_loss
    kappa_0 = cavity.total_loss
    if kind is Coupling.DISPERSIVE:
        coupling = cavity.dispersive_coupling
        shape = 16.0 * kappa_0 * delta
    elif kind is Coupling.DISSIPATIVE:
        coupling = cavity.dissipative_coupling
        shape = -(kappa_0**2) * (kappa_in - kappa_l) + 4.0 * delta**2 * (
            kappa_0 + 2.0 * kappa_in
        )
    else:
        raise TypeError(f"unknown coupling kind: {kind!r}")
    return 2.0 * coupling * kappa_in * shape / (4.0 * delta**2 + kappa_0**2) ** 2


def om_susceptibility_lowfreq(cavity, mode, kind: Coupling, omega, detuning=None):
    """Optomechanical susceptibility in the omega << kappa_0 limit."""
    delta = cavity.detuning if detuning is None else detuning
    delta = np.asarray(delta, dtype=float)
    chi_m = mech_susceptibility(mode, omega)
    result = _lowfreq_detuning_weight(cavity, kind, delta) * chi_m
    return result if np.ndim(result) else complex(result)


def detuning_response_curve(cavity, mode, kind, drive_freq, detunings) -> SpectrumSeries:
    """Response magnitude |chi(omega_drive, Delta)| over a detuning grid.

    This is the curve a network analyser traces when the drive tone is
    held fixed and the laser detuning is swept: for dispersive coupling
    it vanishes at Delta = 0 with two symmetric maxima, for undercoupled
    dissipative coupling it peaks at zero detuning.

    Returns:
        SpectrumSeries with the (sorted) detuning grid as axis, tagged
        ``axis:detuning-rad/s``.
    """
    grid = np.sort(np.asarray(detunings, dtype=float))
    if grid.size == 0:
        raise ValueError("detuning grid must not be empty")
    magnitude = np.abs(om_susceptibility(cavity, mode, kind, drive_freq, grid))
    return SpectrumSeries(
        frequencies=grid,
        values=np.atleast_1d(magnitude),
        unit="per_newton",
        convention="axis:detuning-rad/s",
    )


def golden_section_max(func, lower, upper, tol=1e-12, max_iter=200):
    """Golden-section maximisation of a unimodal scalar function.

    Returns the abscissa of the maximum to absolute tolerance
    ``tol * (upper - lower)``.
    """
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lower), float(upper)
    span = b - a
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(max_iter):
        if b - a <= tol * span:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = func(d)
    return 0.5 * (a + b)


def optimal_detuning_numeric(cavity, kind, search_span=5.0):
    """Numerically maximise the quasi-static |chi| over detuning >= 0.

    A coarse scan locates the best candidate and a golden-section pass
    refines it; deterministic by construction.
    """
    kappa_0 = cavity.total_loss
    upper = search_span * kappa_0

    def magnitude(delta):
        return abs(_lowfreq_detuning_weight(cavity, kind, delta))

    grid = np.linspace(0.0, upper, 4001)
    values = np.abs(_lowfreq_detuning_weight(cavity, kind, grid))
    best = int(np.argmax(values))
    lo = grid[max(best - 2, 0)]
    hi = grid[min(best + 2, len(grid) - 1)]
    refined = golden_section_max(magnitude, lo, hi, tol=1e-14)
    if refined < 1e-9 * kappa_0:
        return 0.0
    return refined


def optimal_detuning(cavity, kind: Coupling):
    """Detuning maximising the quasi-static response.

    Dispersive coupling peaks at |Delta| = kappa_0 / (2 sqrt(3)).  For
    dissipative coupling the optimum is found numerically; it sits at
    Delta = 0 whenever the cavity is sufficiently undercoupled
    (kappa_l >= 5 kappa_in0).
    """
    if kind is Coupling.DISPERSIVE:
        return cavity.total_loss / (2.0 * math.sqrt(3.0))
    if cavity.intrinsic_loss >= 5.0 * cavity.input_coupling:
        return 0.0
    return optimal_detuning_numeric(cavity, kind)


def cavity_transmission(cavity, detuning=None):
    """Static power transmission T(Delta) = |(k_in - k_l - 2i Delta)/(k_0 + 2i Delta)|^2.

    Zero on resonance at critical coupling; approaches 1 far from
    resonance.  The full width at half depth of 1 - T equals kappa_0 at
    critical coupling.
    """
    delta = cavity.detuning if detuning is None else detuning
    delta = np.asarray(delta, dtype=float)
    numer = cavity.input_coupling - cavity.intrinsic_loss - 2j * delta
    denom = cavity.total_loss + 2j * delta
    result = np.abs(numer / denom) ** 2
    return result if result.ndim else float(result)
