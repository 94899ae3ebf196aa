"""Noise budgets, noise-equivalent pressure and sensitivity reporting.

Reported quantities follow the cyclic single-sided convention: the
thermal force density entering the noise-equivalent pressure is

    S_T = 2 (mu l + m gamma / 2pi) k_B T   [N^2/Hz]

with ``l`` the cyclic-convention gas damping length and ``gamma`` the
angular intrinsic damping rate.  This is the bookkeeping that makes the
minimum detectable pressure come out in Pa per sqrt(cyclic Hz); see
``docs/conventions.md`` for how it relates to the time-domain simulator's
force discretisation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import BOLTZMANN, TWO_PI, GasEnvironment, MechanicalMode, OpticalCavity, SpectrumSeries
from .errors import DegenerateModeError
from .response import Coupling, mech_susceptibility, om_susceptibility


def _mu_l(mode: MechanicalMode, gas: GasEnvironment, gas_length):
    """Viscosity times cyclic gas-damping length, from either source.

    When no explicit length is given it is inferred from the mode's gas
    damping rate through gamma_gas / 2pi = mu l / m.
    """
    if gas_length is not None:
        if gas_length < 0.0:
            raise ValueError(f"gas_length must be >= 0, got {gas_length}")
        return gas.viscosity * gas_length
    return mode.effective_mass * mode.gas_damping / TWO_PI


def thermal_force_psd(mode, gas, gas_length=None):
    """Total thermal force density S_T = 2 (mu l + m gamma/2pi) k_B T (N^2/Hz).

    Args:
        mode: supplies the intrinsic damping and, if ``gas_length`` is not
            given, the gas damping rate.
        gas: supplies viscosity and temperature.
        gas_length: optional cyclic-convention characteristic length (m)
            overriding the mode's own gas damping.
    """
    mu_l = _mu_l(mode, gas, gas_length)
    gamma_cyc = mode.intrinsic_damping / TWO_PI
    return 2.0 * (mu_l + mode.effective_mass * gamma_cyc) * BOLTZMANN * gas.temperature


def nep(
    mode,
    gas,
    cavity: OpticalCavity,
    area,
    kind: Coupling,
    omega,
    detuning=None,
    gas_length=None,
    efficiency=1.0,
):
    """Noise-equivalent pressure (minimum detectable pressure), Pa/sqrt(Hz).

    P_min(w) = 1/(r zeta A) * sqrt(2 (mu l + m gamma/2pi) k_B T
                                   + 1 / (N |chi(w, Delta)|^2))

    The shot term is omitted when the effective photon number
    ``efficiency * cavity.photon_number`` is zero (thermal-limited
    sensing).  Accepts an array ``omega`` and returns an array.

    Raises:
        DegenerateModeError: no thermal term and no photons, so nothing
            sets a noise floor.
    """
    if area <= 0.0:
        raise ValueError(f"area must be > 0, got {area}")
    if mode.participation_ratio <= 0.0 or mode.overlap <= 0.0:
        raise ValueError("participation_ratio and overlap must be > 0 for a finite NEP")
    thermal = thermal_force_psd(mode, gas, gas_length)
    photons = efficiency * cavity.photon_number
    if photons > 0.0:
        chi = om_susceptibility(cavity, mode, kind, omega, detuning)
        shot = 1.0 / (photons * np.abs(chi) ** 2)
    else:
        shot = np.zeros(np.shape(omega))
        if thermal == 0.0:
            raise DegenerateModeError("no thermal noise and no photons: NEP undefined")
    scale = 1.0 / (mode.participation_ratio * mode.overlap * area)
    result = scale * np.sqrt(thermal + shot)
    return result if np.ndim(result) else float(result)


def nep_from_snr(applied_pressure, snr, integration_time):
    """Noise-equivalent pressure from a measured signal-to-noise ratio.

    P_min = sqrt(tau / SNR) * P_applied, with SNR given as a linear power
    ratio and tau the integration time in seconds.
    """
    if snr <= 0.0:
        raise ValueError(f"snr must be > 0, got {snr}")
    if integration_time <= 0.0:
        raise ValueError(f"integration_time must be > 0, got {integration_time}")
    return math.sqrt(integration_time / snr) * applied_pressure


def db_to_power_ratio(db):
    """Convert a decibel power figure to a linear ratio."""
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class OneOverFNoise:
    """Flicker-noise model A1 / f^exponent, with A1 the density at 1 Hz."""

    amplitude_at_1hz: float
    exponent: float = 1.0

    def __post_init__(self):
        if self.amplitude_at_1hz < 0.0:
            raise ValueError("amplitude_at_1hz must be >= 0")


@dataclass(frozen=True)
class NoiseSpectrum:
    """Synthesised detector-referred noise spectrum with its components.

    ``total`` is the summed spectrum; ``components`` maps component names
    ("shot", "oneoverf", "mode0:gas", "mode0:intrinsic", ...) to their
    sampled densities on the same grid.  The generating parameters are
    retained so band edges can be solved analytically.
    """

    total: SpectrumSeries
    components: dict
    modes: tuple
    gains: tuple
    shot_floor: float
    temperature: float

    def component_sum(self):
        return sum(self.components.values())


def _mode_transduced_psd(mode, gamma_part, gain, temperature, frequencies):
    """Thermomechanical density of one damping channel through |chi_m|^2."""
    s_force = 2.0 * mode.effective_mass * (gamma_part / TWO_PI) * BOLTZMANN * temperature
    chi = mech_susceptibility(mode, TWO_PI * np.asarray(frequencies, dtype=float))
    return gain * s_force * np.abs(chi) ** 2


def synthesize_noise_spectrum(
    modes: Sequence[Tuple[MechanicalMode, Coupling, float]],
    shot_floor,
    frequencies,
    temperature=300.0,
    oneoverf: Optional[OneOverFNoise] = None,
) -> NoiseSpectrum:
    """Build the detector noise spectrum: shot floor + 1/f + mode Lorentzians.

    Each mode contributes separate gas and intrinsic Lorentzians, both the
    thermomechanical force density transduced through |chi_m|^2 and scaled
    by the per-mode transduction gain; their area ratio therefore equals
    gamma_gas / gamma.  The shot floor is a direct level parameter rather
    than a prediction from photon number.

    Args:
        modes: (mode, coupling kind, transduction gain) triples.
        shot_floor: flat detector-referred density (units^2/Hz).
        frequencies: strictly increasing grid (Hz).
        temperature: bath temperature (K).
        oneoverf: optional flicker-noise component.

    Returns:
        NoiseSpectrum whose total equals the sum of its components at
        every grid point.
    """
    f = np.asarray(frequencies, dtype=float)
    if f.size == 0 or np.any(f <= 0.0) or (f.size > 1 and not np.all(np.diff(f) > 0)):
        raise ValueError("frequency grid must be positive and strictly increasing")
    if shot_floor < 0.0:
        raise ValueError("shot_floor must be >= 0")

    components = {"shot": np.full_like(f, float(shot_floor))}
    if oneoverf is not None and oneoverf.amplitude_at_1hz > 0.0:
        components["oneoverf"] = oneoverf.amplitude_at_1hz / f**oneoverf.exponent
    for index, (mode, _kind, gain) in enumerate(modes):
        if mode.gas_damping > 0.0:
            components[f"mode{index}:gas"] = _mode_transduced_psd(
                mode, mode.gas_damping, gain, temperature, f
            )
        if mode.intrinsic_damping > 0.0:
            components[f"mode{index}:intrinsic"] = _mode_transduced_psd(
                mode, mode.intrinsic_damping, gain, temperature, f
            )
    total = sum(components.values())
    series = SpectrumSeries(f, total, unit="detector_units^2/Hz")
    return NoiseSpectrum(
        total=series,
        components=components,
        modes=tuple(modes),
        gains=tuple(gain for _, _, gain in modes),
        shot_floor=float(shot_floor),
        temperature=float(temperature),
    )


def lorentzian_peak_psd(mode, gain, temperature):
    """Exact maximum of the transduced thermomechanical density of a mode."""
    s_force = (
        2.0 * mode.effective_mass * (mode.total_damping / TWO_PI) * BOLTZMANN * temperature
    )
    w2 = mode.resonance_freq**2
    g2 = mode.total_damping**2
    peak_chi2 = 1.0 / (mode.effective_mass**2 * (g2 * w2 - g2 * g2 / 4.0))
    return gain * s_force * peak_chi2


def gain_for_peak_ratio(mode, shot_floor, ratio_db, temperature=300.0):
    """Transduction gain placing the mode peak ``ratio_db`` above the shot floor."""
    target = shot_floor * db_to_power_ratio(ratio_db)
    return target / lorentzian_peak_psd(mode, 1.0, temperature)


def resonant_bandwidth(spectrum: NoiseSpectrum, mode_index=0):
    """Band around a mode where its thermomechanical noise exceeds the shot floor.

    Solves D |chi_m(w)|^2 = shot exactly; the quartic in omega factors as
    a quadratic in omega^2.

    Returns:
        (f_lo, f_hi) in Hz, or None when the peak never crosses the floor.
    """
    if spectrum.shot_floor <= 0.0:
        raise ValueError("resonant bandwidth needs a positive shot floor")
    if not spectrum.modes:
        raise ValueError("spectrum contains no mode components")
    mode, _kind, gain = spectrum.modes[mode_index]
    s_force = (
        2.0
        * mode.effective_mass
        * (mode.total_damping / TWO_PI)
        * BOLTZMANN
        * spectrum.temperature
    )
    strength = gain * s_force / mode.effective_mass**2
    # (w_m^2 - w^2)^2 + g^2 w^2 = strength / shot  ==>  quadratic in y = w^2.
    q = strength / spectrum.shot_floor
    wm2 = mode.resonance_freq**2
    g2 = mode.total_damping**2
    half_b = wm2 - 0.5 * g2
    disc = half_b**2 - (wm2**2 - q)
    if disc <= 0.0:
        return None
    root = math.sqrt(disc)
    y_hi = half_b + root
    y_lo = half_b - root
    if y_hi <= 0.0:
        return None
    f_hi = math.sqrt(y_hi) / TWO_PI
    f_lo = math.sqrt(max(y_lo, 0.0)) / TWO_PI
    return (f_lo, f_hi)


def ldr(nep_value, max_pressure, integration_time):
    """Linear dynamic range in dB.

    LDR = 20 log10(P_max / (P_min / sqrt(tau))) for a noise-equivalent
    pressure P_min in Pa/sqrt(Hz) integrated over tau seconds.
    """
    if nep_value <= 0.0 or max_pressure <= 0.0 or integration_time <= 0.0:
        raise ValueError("ldr arguments must all be > 0")
    noise_pressure = nep_value / math.sqrt(integration_time)
    return 20.0 * math.log10(max_pressure / noise_pressure)


def force_sensitivity(nep_value, area):
    """Force sensitivity in N/sqrt(Hz): pressure sensitivity times sensing area."""
    if nep_value < 0.0 or area < 0.0:
        raise ValueError("force_sensitivity arguments must be >= 0")
    return nep_value * area


class DominantNoise(Enum):
    GAS = "gas"
    INTRINSIC = "intrinsic"
    SHOT = "shot"
    ONE_OVER_F = "oneoverf"


@dataclass(frozen=True)
class SensitivityReport:
    """Headline sensitivity numbers for one mode.

    Attributes:
        nep: noise-equivalent pressure at the reporting frequency (Pa/sqrt(Hz)).
        band: resonantly enhanced band (f_lo, f_hi) in Hz, or None.
        dominant_term: largest noise component at the reporting frequency.
    """

    nep: float
    band: Optional[Tuple[float, float]]
    dominant_term: DominantNoise

    def __post_init__(self):
        if self.nep <= 0.0:
            raise ValueError("nep must be > 0")
        if self.band is not None and not self.band[0] < self.band[1]:
            raise ValueError("band must satisfy f_lo < f_hi")


def sensitivity_report(spectrum: NoiseSpectrum, nep_value, mode_index=0) -> SensitivityReport:
    """Assemble the sensitivity report for one mode of a synthesised spectrum."""
    mode, _kind, _gain = spectrum.modes[mode_index]
    f_report = mode.resonance_freq / TWO_PI
    grid = spectrum.total.frequencies
    at = int(np.argmin(np.abs(grid - f_report)))
    levels = {}
    for name, values in spectrum.components.items():
        if name == "shot":
            levels[DominantNoise.SHOT] = levels.get(DominantNoise.SHOT, 0.0) + values[at]
        elif name == "oneoverf":
            levels[DominantNoise.ONE_OVER_F] = values[at]
        elif name.endswith(":gas"):
            levels[DominantNoise.GAS] = levels.get(DominantNoise.GAS, 0.0) + values[at]
        else:
            levels[DominantNoise.INTRINSIC] = (
                levels.get(DominantNoise.INTRINSIC, 0.0) + values[at]
            )
    dominant = max(levels, key=levels.get)
    band = resonant_bandwidth(spectrum, mode_index)
    return SensitivityReport(nep=nep_value, band=band, dominant_term=dominant)
