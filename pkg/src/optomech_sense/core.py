"""Core domain types and unit conventions.

Unit conventions, used consistently by every module:

* strict SI internally; lengths in metres, masses in kg, pressures in Pa;
* every stored rate (mechanical damping, optical decay, detuning,
  resonance frequency) is angular, in rad/s;
* reported spectra are single-sided densities per cyclic hertz, and
  damping rates enter reported noise densities as cyclic rates
  (rad/s divided by 2*pi).  ``docs/conventions.md`` derives the
  bookkeeping once so the rest of the code can just apply it.

All types are immutable after construction and all functions are pure,
so values can be shared freely between threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGeometryError, InvalidModeError

BOLTZMANN = 1.380649e-23  # J/K, exact in the 2019 SI
SPEED_OF_LIGHT = 299792458.0  # m/s
TWO_PI = 2.0 * math.pi


def angular_to_cyclic(rate):
    """Convert an angular rate (rad/s) to a cyclic rate (Hz)."""
    return rate / TWO_PI


def cyclic_to_angular(rate):
    """Convert a cyclic rate (Hz) to an angular rate (rad/s)."""
    return rate * TWO_PI


@dataclass(frozen=True)
class SensorGeometry:
    """Annular spoked-disk sensor geometry.

    Attributes:
        major_radius: outer disk radius (m).
        minor_radius: inner (spoke/annulus) radius (m); 0 for a full disk.
        thickness: device layer thickness (m).
        density: material mass density (kg/m^3).
        substrate_gap: height of the suspended disk above the substrate (m).
        active_fraction: fraction of the area that senses pressure, in (0, 1].
            Kept at 1.0 by default; the annular area formula already excludes
            the spoked center, so only scale by this when explicitly modelling
            a further-reduced active region.
    """

    major_radius: float
    minor_radius: float
    thickness: float
    density: float
    substrate_gap: float
    active_fraction: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.minor_radius < self.major_radius):
            raise InvalidGeometryError(
                f"need 0 <= minor_radius < major_radius, got "
                f"{self.minor_radius} and {self.major_radius}"
            )
        if self.thickness <= 0.0:
            raise InvalidGeometryError(f"thickness must be > 0, got {self.thickness}")
        if self.density <= 0.0:
            raise InvalidGeometryError(f"density must be > 0, got {self.density}")
        if self.substrate_gap <= 0.0:
            raise InvalidGeometryError(
                f"substrate_gap must be > 0, got {self.substrate_gap}"
            )
        if not (0.0 < self.active_fraction <= 1.0):
            raise InvalidGeometryError(
                f"active_fraction must lie in (0, 1], got {self.active_fraction}"
            )

    @property
    def area(self):
        """Annulus surface area pi*(R^2 - r^2) (m^2)."""
        return math.pi * (self.major_radius**2 - self.minor_radius**2)

    @property
    def total_mass(self):
        """Total structural mass rho*t*A (kg)."""
        return self.density * self.thickness * self.area

    @property
    def beta_ratio(self):
        """Radius ratio minor_radius / major_radius (dimensionless)."""
        return self.minor_radius / self.major_radius


@dataclass(frozen=True)
class DerivedGeometry:
    """Quantities derived from a :class:`SensorGeometry`."""

    area: float  # m^2
    total_mass: float  # kg
    beta_ratio: float  # dimensionless


def derive_geometry(geometry: SensorGeometry) -> DerivedGeometry:
    """Compute area, total mass and radius ratio for a sensor geometry."""
    return DerivedGeometry(
        area=geometry.area,
        total_mass=geometry.total_mass,
        beta_ratio=geometry.beta_ratio,
    )


@dataclass(frozen=True)
class MechanicalMode:
    """Single mechanical eigenmode of the sensor.

    Attributes:
        resonance_freq: angular resonance frequency omega_m (rad/s).
        intrinsic_damping: intrinsic (clamping/material) damping rate (rad/s).
        effective_mass: modeshape-weighted mass (kg).
        gas_damping: fluidic damping rate (rad/s).
        overlap: spatial overlap of the modeshape with the incident
            pressure profile, in [0, 1].
        participation_ratio: net pressure difference across the resonator
            divided by the antinode pressure of the incident wave; may
            exceed 1 for resonantly confined fields under the device.
    """

    resonance_freq: float
    intrinsic_damping: float
    effective_mass: float
    gas_damping: float = 0.0
    overlap: float = 1.0
    participation_ratio: float = 1.0

    def __post_init__(self):
        if self.effective_mass <= 0.0:
            raise InvalidModeError(f"effective_mass must be > 0, got {self.effective_mass}")
        if self.resonance_freq <= 0.0:
            raise InvalidModeError(f"resonance_freq must be > 0, got {self.resonance_freq}")
        if self.intrinsic_damping < 0.0 or self.gas_damping < 0.0:
            raise InvalidModeError("damping rates must be >= 0")
        if not (0.0 <= self.overlap <= 1.0):
            raise InvalidModeError(f"overlap must lie in [0, 1], got {self.overlap}")
        if self.participation_ratio < 0.0:
            raise InvalidModeError(
                f"participation_ratio must be >= 0, got {self.participation_ratio}"
            )

    @property
    def total_damping(self):
        """Total mechanical damping gamma_m = gamma + gamma_gas (rad/s)."""
        return self.intrinsic_damping + self.gas_damping

    @property
    def spring_constant(self):
        """Effective spring constant k = m * omega_m^2 (N/m)."""
        return self.effective_mass * self.resonance_freq**2


@dataclass(frozen=True)
class OpticalCavity:
    """Optical cavity probing the mechanical element.

    All decay rates and detunings are angular (rad/s).  The photon number
    is an opaque calibration parameter: detection inefficiency is folded
    in by scaling it, and no absolute shot-floor prediction is implied.

    Attributes:
        intrinsic_loss: intracavity loss rate kappa_l (rad/s).
        input_coupling: waveguide input coupling rate kappa_in0 (rad/s),
            value in the absence of acoustic drive.
        detuning: laser-cavity detuning Delta (rad/s).
        dispersive_coupling: frequency pull per displacement (rad/s per m).
        dissipative_coupling: fractional input-coupling modulation per
            displacement (1/m).
        vacuum_coupling: single-photon coupling rate g0 (rad/s).
        photon_number: circulating/input photon number N (dimensionless).
        wavelength: optical wavelength (m).
    """

    intrinsic_loss: float
    input_coupling: float
    detuning: float = 0.0
    dispersive_coupling: float = 0.0
    dissipative_coupling: float = 0.0
    vacuum_coupling: float = 0.0
    photon_number: float = 0.0
    wavelength: float = 1.55e-6

    def __post_init__(self):
        if self.intrinsic_loss <= 0.0:
            raise ValueError(f"intrinsic_loss must be > 0, got {self.intrinsic_loss}")
        if self.input_coupling <= 0.0:
            raise ValueError(f"input_coupling must be > 0, got {self.input_coupling}")
        if self.photon_number < 0.0:
            raise ValueError(f"photon_number must be >= 0, got {self.photon_number}")
        if self.wavelength <= 0.0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength}")

    @property
    def total_loss(self):
        """Loaded cavity decay rate kappa_0 = kappa_in0 + kappa_l (rad/s)."""
        return self.input_coupling + self.intrinsic_loss

    @property
    def loaded_quality_factor(self):
        """Loaded optical quality factor omega_opt / kappa_0."""
        omega_optical = TWO_PI * SPEED_OF_LIGHT / self.wavelength
        return omega_optical / self.total_loss

    @property
    def is_critically_coupled(self):
        return math.isclose(self.input_coupling, self.intrinsic_loss, rel_tol=1e-12)


@dataclass(frozen=True)
class GasEnvironment:
    """Properties of the gas the acoustic wave propagates through.

    Defaults are dry air at room temperature.
    """

    viscosity: float = 1.8e-5  # kg/(m s)
    temperature: float = 300.0  # K
    density: float = 1.2  # kg/m^3
    sound_speed: float = 343.0  # m/s
    acoustic_impedance: float = 413.0  # Pa s/m
    heat_capacity: float = 1005.0  # J/(kg K)
    expansion_coeff: float = 0.0034  # 1/K
    static_pressure: float = 101325.0  # Pa

    def __post_init__(self):
        for name in (
            "viscosity",
            "temperature",
            "density",
            "sound_speed",
            "acoustic_impedance",
            "heat_capacity",
            "expansion_coeff",
            "static_pressure",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"gas {name} must be > 0, got {getattr(self, name)}")

    @classmethod
    def air(cls) -> "GasEnvironment":
        """Room-temperature air at one atmosphere."""
        return cls()

    @property
    def number_density(self):
        """Ideal-gas molecular number density at (static_pressure, temperature) (1/m^3)."""
        return self.static_pressure / (BOLTZMANN * self.temperature)


DEFAULT_CONVENTION = "single-sided,cyclic-hz"


@dataclass(frozen=True)
class SpectrumSeries:
    """Frequency-indexed samples with explicit unit and convention tags.

    This is the universal I/O currency for spectra, response curves and
    calibration products.  The axis must be strictly increasing; values
    may be real or complex.  Arrays are copied and frozen on construction.

    Attributes:
        frequencies: axis samples, cyclic Hz for spectra (detuning axes
            in rad/s are tagged through ``convention``).
        values: samples, same length as the axis.
        unit: unit tag of the values; never empty.
        convention: axis/density convention tag.
    """

    frequencies: np.ndarray
    values: np.ndarray
    unit: str
    convention: str = DEFAULT_CONVENTION

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float).copy()
        values = np.asarray(self.values).copy()
        if values.dtype.kind not in "fc":
            values = values.astype(float)
        if freqs.ndim != 1 or values.ndim != 1:
            raise ValueError("frequencies and values must be 1-D arrays")
        if len(freqs) != len(values):
            raise ValueError(
                f"length mismatch: {len(freqs)} frequencies vs {len(values)} values"
            )
        if len(freqs) > 1 and not np.all(np.diff(freqs) > 0.0):
            raise ValueError("frequencies must be strictly increasing")
        if not self.unit:
            raise ValueError("unit tag must not be empty")
        freqs.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.frequencies)

    def interpolated(self, new_frequencies) -> "SpectrumSeries":
        """Linear interpolation onto a new axis (complex handled per part)."""
        new_f = np.asarray(new_frequencies, dtype=float)
        if np.iscomplexobj(self.values):
            real = np.interp(new_f, self.frequencies, self.values.real)
            imag = np.interp(new_f, self.frequencies, self.values.imag)
            vals = real + 1j * imag
        else:
            vals = np.interp(new_f, self.frequencies, self.values)
        return SpectrumSeries(new_f, vals, self.unit, self.convention)
