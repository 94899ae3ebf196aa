"""Application-level estimators built on the sensor model.

Covers photoacoustic trace-gas detection limits, acoustic detection of
cellular vibrations, optomechanical cooling for response flattening,
modeshape overlap and effective-mass integrals, and the Rayleigh-length
analysis used to assign effective areas to open acoustic sensors.

Spectroscopic line data conventionally comes in cm-based units; the
converters below centralise the translation into SI so the estimator
formulas stay unit-clean.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import TWO_PI, GasEnvironment, MechanicalMode, OpticalCavity, SensorGeometry


def per_cm_to_per_m(value):
    """Convert a quantity in 1/cm to 1/m."""
    return value * 100.0


def per_cm2_to_per_m2(value):
    """Convert a column density in 1/cm^2 to 1/m^2."""
    return value * 1e4


def line_intensity_to_si(value):
    """Convert a spectral line intensity from cm^-1/(molec cm^-2) to m/molec."""
    return value * 1e-2


def per_m3_to_per_cm3(value):
    """Convert a number density from 1/m^3 to 1/cm^3."""
    return value * 1e-6


@dataclass(frozen=True)
class LaserPulse:
    """Excitation pulse for photoacoustic generation."""

    energy: float  # J
    duration: float  # s
    beam_radius: float  # m

    def __post_init__(self):
        if self.energy <= 0.0 or self.duration <= 0.0 or self.beam_radius <= 0.0:
            raise ValueError("pulse energy, duration and beam radius must be > 0")

    def beam_fits_source(self, gas: GasEnvironment) -> bool:
        """True when the beam radius is below the acoustic source radius v * tau."""
        return self.beam_radius < gas.sound_speed * self.duration


@dataclass(frozen=True)
class GasLine:
    """Absorption line of the target gas, in spectroscopic cm units."""

    line_intensity: float  # cm^-1 / (molec cm^-2)
    linewidth: float  # cm^-1
    wavelength: float  # m

    def __post_init__(self):
        if self.line_intensity <= 0.0 or self.linewidth <= 0.0:
            raise ValueError("line intensity and linewidth must be > 0")
        if self.wavelength <= 0.0:
            raise ValueError("wavelength must be > 0")


@dataclass(frozen=True)
class PhotoacousticWave:
    """Acoustic wave launched by a single absorbed pulse."""

    displacement: float  # m, peak displacement at the sensor distance
    peak_pressure: float  # Pa
    source_radius: float  # m, v * tau
    beam_valid: bool  # beam radius below the source radius


def photoacoustic_pressure(gas, pulse: LaserPulse, absorption_coeff, distance) -> PhotoacousticWave:
    """Pressure wave generated by pulsed absorption in the gas.

    Peak displacement at distance r (spherical spreading, so 1/r):

        U_s = beta E alpha / (2 pi rho C_p r)

    and peak pressure P = v rho U_s / tau_L.  Assumes a thin absorbing
    medium; a warning is emitted when alpha times the source radius is
    not small.

    Args:
        absorption_coeff: optical absorption coefficient alpha (1/m).
        distance: source-sensor separation r (m).
    """
    if distance <= 0.0:
        raise ValueError("distance must be > 0")
    if absorption_coeff < 0.0:
        raise ValueError("absorption coefficient must be >= 0")
    source_radius = gas.sound_speed * pulse.duration
    if absorption_coeff * source_radius > 0.1:
        warnings.warn(
            "thin-medium assumption violated: alpha * v * tau = "
            f"{absorption_coeff * source_radius:.3f} is not << 1",
            stacklevel=2,
        )
    beam_valid = pulse.beam_fits_source(gas)
    if not beam_valid:
        warnings.warn(
            "beam radius exceeds the acoustic source radius v * tau", stacklevel=2
        )
    displacement = (
        gas.expansion_coeff
        * pulse.energy
        * absorption_coeff
        / (TWO_PI * gas.density * gas.heat_capacity * distance)
    )
    peak_pressure = gas.sound_speed * gas.density * displacement / pulse.duration
    return PhotoacousticWave(
        displacement=displacement,
        peak_pressure=peak_pressure,
        source_radius=source_radius,
        beam_valid=beam_valid,
    )


def effective_pressure(peak_pressure, pulse_duration, mech_freq):
    """Effective drive pressure over one mechanical period.

    P_eff = P_peak * tau_L * omega_m / (2 pi): the pulse acts for a
    fraction tau_L of the oscillation period.
    """
    if pulse_duration <= 0.0 or mech_freq <= 0.0:
        raise ValueError("pulse duration and mechanical frequency must be > 0")
    return peak_pressure * pulse_duration * mech_freq / TWO_PI


@dataclass(frozen=True)
class ConcentrationLimit:
    """Minimum detectable gas concentration."""

    number_density: float  # molec/m^3
    number_density_cm3: float  # molec/cm^3
    ppb: float  # parts per billion at the gas T, p


def min_concentration(
    gas, line: GasLine, pulse: LaserPulse, min_effective_pressure, distance, mech_freq
) -> ConcentrationLimit:
    """Minimum detectable molecular number density by photoacoustic sensing.

    c_min = 8 pi^2 gamma_G C_p r / (v beta E S omega_m) * P_eff_min

    with the spectroscopic inputs converted from cm units to SI.  The
    parts-per-billion figure uses the ideal-gas number density at the
    configured gas temperature and static pressure.
    """
    if min_effective_pressure <= 0.0:
        raise ValueError("min_effective_pressure must be > 0")
    if distance <= 0.0 or mech_freq <= 0.0:
        raise ValueError("distance and mechanical frequency must be > 0")
    linewidth_si = per_cm_to_per_m(line.linewidth)
    intensity_si = line_intensity_to_si(line.line_intensity)
    density = (
        8.0
        * math.pi**2
        * linewidth_si
        * gas.heat_capacity
        * distance
        * min_effective_pressure
        / (
            gas.sound_speed
            * gas.expansion_coeff
            * pulse.energy
            * intensity_si
            * mech_freq
        )
    )
    ppb = density / gas.number_density * 1e9
    return ConcentrationLimit(
        number_density=density,
        number_density_cm3=per_m3_to_per_cm3(density),
        ppb=ppb,
    )


def absorption_from_concentration(density, line: GasLine):
    """Optical absorption coefficient alpha = c S / (2 gamma_G) in 1/m."""
    return density * line_intensity_to_si(line.line_intensity) / (
        2.0 * per_cm_to_per_m(line.linewidth)
    )


def cell_vibration_pressure(frequency, displacement, gas: GasEnvironment):
    """Pressure radiated by a vibrating surface: P = pi nu Z d (Pa)."""
    if frequency <= 0.0:
        raise ValueError("frequency must be > 0")
    if displacement < 0.0:
        raise ValueError("displacement must be >= 0")
    return math.pi * frequency * gas.acoustic_impedance * displacement


def detectable_displacement(nep_value, frequency, gas, bandwidth=1.0):
    """Smallest detectable surface vibration amplitude (m).

    d_min = NEP * sqrt(bandwidth) / (pi nu Z): the inverse of the
    vibrating-surface pressure relation at the sensor noise floor.
    """
    if nep_value <= 0.0 or frequency <= 0.0 or bandwidth <= 0.0:
        raise ValueError("nep, frequency and bandwidth must be > 0")
    return nep_value * math.sqrt(bandwidth) / (math.pi * frequency * gas.acoustic_impedance)


def cooperativity(cavity: OpticalCavity, mode: MechanicalMode):
    """Optomechanical cooperativity C = 4 g0^2 N / (kappa_0 gamma_m)."""
    gamma = mode.total_damping
    if gamma <= 0.0:
        raise ValueError("cooperativity needs a nonzero mechanical linewidth")
    return 4.0 * cavity.vacuum_coupling**2 * cavity.photon_number / (
        cavity.total_loss * gamma
    )


def cooled_linewidth(gamma, cooperativity_value):
    """Mechanical linewidth under maximal cold-damping broadening.

    gamma_eff = gamma (1 + C).  This is an upper-bound model: feedback or
    cavity cooling can broaden the resonance by at most the cooperativity
    without adding thermal noise.
    """
    if cooperativity_value < 0.0:
        raise ValueError("cooperativity must be >= 0")
    return gamma * (1.0 + cooperativity_value)


def cooling_flattened_peak(peak, cooperativity_value):
    """Peak density after cooling-induced flattening.

    The broadening conserves the area of the thermomechanical Lorentzian,
    so the peak drops by the same factor the linewidth grows.
    """
    return peak / (1.0 + cooperativity_value)


@dataclass(frozen=True)
class ModeshapeGrid:
    """Sampled out-of-plane modeshape on an unstructured surface grid.

    ``displacement`` is expressed in units of the mode's maximum
    displacement, so its magnitude never exceeds one (a fully normalised
    shape touches exactly one).  Each sample carries the area of its grid
    cell; the cell areas sum to the resonator area when the grid covers
    the whole device.
    """

    x: np.ndarray  # m
    y: np.ndarray  # m
    displacement: np.ndarray  # dimensionless, |u| <= 1
    cell_area: np.ndarray  # m^2

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        u = np.asarray(self.displacement, dtype=float)
        da = np.asarray(self.cell_area, dtype=float)
        if not (len(x) == len(y) == len(u) == len(da)):
            raise ValueError("modeshape arrays must have equal length")
        if len(x) == 0:
            raise ValueError("modeshape grid is empty")
        if np.any(da <= 0.0):
            raise ValueError("cell areas must be > 0")
        peak = np.max(np.abs(u))
        if peak == 0.0 or peak > 1.0 + 1e-9:
            raise ValueError(
                f"modeshape must satisfy 0 < max |u| <= 1, got max {peak:.12f}"
            )
        for name, arr in (("x", x), ("y", y), ("displacement", u), ("cell_area", da)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def total_area(self):
        return float(np.sum(self.cell_area))

    @property
    def is_normalized(self):
        """True when the shape touches max |u| = 1 within 1e-9."""
        return abs(float(np.max(np.abs(self.displacement))) - 1.0) <= 1e-9

    def normalized(self) -> "ModeshapeGrid":
        """Rescale the shape so its largest magnitude is exactly one."""
        peak = float(np.max(np.abs(self.displacement)))
        return ModeshapeGrid(
            x=self.x, y=self.y, displacement=self.displacement / peak,
            cell_area=self.cell_area,
        )

    def matches_geometry(self, geometry: SensorGeometry, rel_tol=1e-6) -> bool:
        """Whether the grid tiles the resonator area to the given tolerance."""
        return abs(self.total_area - geometry.area) <= rel_tol * geometry.area


def mode_overlap(shape: ModeshapeGrid, pressure_field):
    """Area-normalised overlap of modeshape and incident pressure profile.

    zeta = (1/A) * sum(u * dp * dA) over the resonator surface, with the
    pressure field normalised to the antinode of the incident wave.  A
    rigid piston under uniform pressure gives exactly 1; antisymmetric
    modes under uniform pressure cancel to 0.  The magnitude is what
    enters sensitivity formulas; the sign indicates drive phase.

    Raises:
        ValueError: pressure field length does not match the grid.
    """
    dp = np.asarray(pressure_field, dtype=float)
    if len(dp) != len(shape.displacement):
        raise ValueError(
            f"pressure field has {len(dp)} samples, grid has {len(shape.displacement)}"
        )
    return float(
        np.sum(shape.displacement * dp * shape.cell_area) / shape.total_area
    )


def effective_mass(shape: ModeshapeGrid, thickness, density):
    """Modeshape-weighted mass m = t rho * sum(|u| dA) (kg)."""
    if thickness <= 0.0 or density <= 0.0:
        raise ValueError("thickness and density must be > 0")
    return float(thickness * density * np.sum(np.abs(shape.displacement) * shape.cell_area))


def annular_tilt_modeshape(
    geometry: SensorGeometry, node_radius, n_radial=400, n_azimuthal=1
) -> ModeshapeGrid:
    """Synthetic axisymmetric tilt mode of an annulus, u(r) linear in r.

    The displacement crosses zero at ``node_radius`` and is normalised to
    its largest magnitude on the annulus.  Useful as an approximate
    flapping-mode stand-in: with the node placed between the area
    centroid and the rim, the counter-moving inner region largely cancels
    the outer one, leaving a small residual overlap with a plane wave.
    """
    r_in, r_out = geometry.minor_radius, geometry.major_radius
    if not (r_in <= node_radius <= r_out):
        raise ValueError("node_radius must lie within the annulus")
    edges = np.linspace(r_in, r_out, n_radial + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    ring_area = math.pi * (edges[1:] ** 2 - edges[:-1] ** 2) / n_azimuthal
    theta = (np.arange(n_azimuthal) + 0.5) * (TWO_PI / n_azimuthal)
    rr = np.repeat(centers, n_azimuthal)
    tt = np.tile(theta, n_radial)
    da = np.repeat(ring_area, n_azimuthal)
    u = rr - node_radius
    u = u / np.max(np.abs(u))
    return ModeshapeGrid(
        x=rr * np.cos(tt), y=rr * np.sin(tt), displacement=u, cell_area=da
    )


def rayleigh_analysis(acoustic_wavelength, beam_radius=None, rayleigh_length=None):
    """Relate an acoustic beam radius to its Rayleigh (diffraction) length.

    z_R = pi w^2 / lambda.  Supply exactly one of ``beam_radius`` or
    ``rayleigh_length``; the other is returned.
    """
    if acoustic_wavelength <= 0.0:
        raise ValueError("wavelength must be > 0")
    if (beam_radius is None) == (rayleigh_length is None):
        raise ValueError("supply exactly one of beam_radius or rayleigh_length")
    if beam_radius is not None:
        if beam_radius <= 0.0:
            raise ValueError("beam_radius must be > 0")
        return math.pi * beam_radius**2 / acoustic_wavelength
    if rayleigh_length <= 0.0:
        raise ValueError("rayleigh_length must be > 0")
    return math.sqrt(rayleigh_length * acoustic_wavelength / math.pi)
