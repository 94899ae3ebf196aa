"""Interferometric calibration chain: from S21 sweeps to applied pressure.

A piezo transducer with an attached mirror forms one arm of a Michelson
interferometer; the network-analyser transfer |S21| between the piezo
drive and the photodetector, referenced to a frequency where the fringe
voltage is known, yields the absolute displacement spectrum.  Pressure
at the transducer follows from the radiating-piston relation, and the
pressure arriving at the sensor is corrected for on-axis aperture
diffraction and atmospheric absorption over the propagation path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _special

from .core import GasEnvironment, SpectrumSeries
from .errors import DataFormatError


@dataclass(frozen=True)
class S21Sweep:
    """Network-analyser sweep of the interferometer response.

    Attributes:
        frequencies: sweep axis (Hz), strictly increasing.
        s21_power: |S21|^2 in linear units (> 0).
        reference_freq: calibration reference frequency (Hz); must be one
            of the sweep points.
        reference_voltage: photodetector voltage at the reference (V).
        max_voltage: fringe maximum voltage, corresponding to a quarter
            wavelength of mirror travel (V).
        drive_voltage: voltage applied to the piezo during the sweep (V);
            segments taken at other drives are rescaled to this value
            before being compiled into one sweep.
    """

    frequencies: np.ndarray
    s21_power: np.ndarray
    reference_freq: float
    reference_voltage: float
    max_voltage: float
    drive_voltage: float = 1.0

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float)
        power = np.asarray(self.s21_power, dtype=float)
        if len(freqs) != len(power):
            raise ValueError("frequencies and s21_power must have equal length")
        if len(freqs) > 1 and not np.all(np.diff(freqs) > 0):
            raise ValueError("frequencies must be strictly increasing")
        if np.any(power <= 0.0):
            raise ValueError("s21_power must be > 0 everywhere")
        if self.reference_voltage > self.max_voltage:
            raise ValueError("reference_voltage cannot exceed max_voltage")
        if self.max_voltage <= 0.0 or self.reference_voltage < 0.0:
            raise ValueError("voltages must be positive")
        if not np.any(np.isclose(freqs, self.reference_freq, rtol=1e-9)):
            raise ValueError(
                f"reference_freq {self.reference_freq} Hz is not a sweep point"
            )
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "s21_power", power)

    @property
    def reference_index(self):
        return int(np.argmin(np.abs(self.frequencies - self.reference_freq)))


@dataclass(frozen=True)
class PztDisplacement:
    """Displacement spectrum with per-point fringe saturation flags."""

    displacement: SpectrumSeries  # metres
    saturated: np.ndarray  # bool, True where d >= lambda/4


def pzt_displacement(sweep: S21Sweep, wavelength) -> PztDisplacement:
    """Displacement spectrum of the calibrated piezo.

    d(w) = (lambda/4) * (V_ref / V_max) * sqrt(S21(w) / S21(w_ref))

    Only the ratio to the reference S21 enters, so any global rescaling
    of the sweep cancels.  Points at or beyond a quarter wavelength are
    flagged saturated: there the fringe signal no longer increases with
    displacement and the value is a lower bound.
    """
    if wavelength <= 0.0:
        raise ValueError("wavelength must be > 0")
    ref = sweep.s21_power[sweep.reference_index]
    if ref == 0.0:
        raise ValueError("S21 at the reference frequency is zero")
    quarter_wave = wavelength / 4.0
    d = quarter_wave * (sweep.reference_voltage / sweep.max_voltage) * np.sqrt(
        sweep.s21_power / ref
    )
    saturated = d >= quarter_wave * (1.0 - 1e-12)
    series = SpectrumSeries(sweep.frequencies, d, unit="m")
    return PztDisplacement(displacement=series, saturated=saturated)


def pzt_pressure(displacement, frequency, gas: GasEnvironment):
    """Acoustic pressure radiated by a piston: P = pi * nu * d * Z (Pa).

    Vectorised over displacement and frequency.
    """
    return math.pi * np.asarray(frequency, dtype=float) * np.asarray(
        displacement, dtype=float
    ) * gas.acoustic_impedance


@dataclass(frozen=True)
class PropagationPath:
    """Transducer-to-sensor acoustic path with its air-absorption inputs."""

    distance: float  # m
    aperture_side: float  # m, side of the square radiating aperture
    temperature: float = 293.15  # K
    relative_humidity: float = 50.0  # percent
    pressure: float = 101325.0  # Pa

    def __post_init__(self):
        if self.distance < 0.0:
            raise ValueError("distance must be >= 0")
        if self.aperture_side <= 0.0:
            raise ValueError("aperture_side must be > 0")


def diffraction_factor(path: PropagationPath, frequency, gas, aperture="square"):
    """On-axis diffraction amplitude ratio c(nu) for the radiating aperture.

    For a uniform square aperture of side a at distance L the on-axis
    Fresnel field relative to an unobstructed plane wave is

        c = 2 (C(u)^2 + S(u)^2),  u = (a/2) sqrt(2 / (lambda_ac L))

    with C, S the Fresnel integrals and lambda_ac = v / nu.  The ratio
    tends to 0 for wavelengths large against the aperture and oscillates
    about 1 (bounded by 2) in the near field.  A circular aperture of the
    same side-as-diameter is available for sensitivity analysis.
    """
    nu = np.asarray(frequency, dtype=float)
    if np.any(nu <= 0.0):
        raise ValueError("frequency must be > 0")
    wavelength = gas.sound_speed / nu
    if aperture == "square":
        u = 0.5 * path.aperture_side * np.sqrt(2.0 / (wavelength * path.distance))
        s, c = _special.fresnel(u)
        result = 2.0 * (c**2 + s**2)
    elif aperture == "circular":
        radius = 0.5 * path.aperture_side
        result = 2.0 * np.abs(
            np.sin(math.pi * radius**2 / (2.0 * wavelength * path.distance))
        )
    else:
        raise ValueError(f"unknown aperture shape: {aperture!r}")
    return result if np.ndim(result) else float(result)


# ISO 9613-1 style humid-air absorption model (classical plus N2/O2
# vibrational relaxation), valid over ordinary meteorological ranges.
_ABSORPTION_TEMPERATURE_RANGE = (233.15, 330.0)
_ABSORPTION_PRESSURE_RANGE = (50e3, 200e3)
_ABSORPTION_FREQUENCY_RANGE = (1.0, 10e6)
_REFERENCE_PRESSURE = 101325.0
_T_TRIPLE = 273.16
_T_REFERENCE = 293.15


def air_absorption_db_per_m(frequency, temperature=293.15, relative_humidity=50.0, pressure=101325.0):
    """Atmospheric sound absorption coefficient in dB per metre.

    Standard humid-air model: classical/rotational losses plus oxygen and
    nitrogen vibrational relaxation, with relaxation frequencies set by
    the molar water concentration.

    Raises:
        ValueError: inputs outside the model validity range.
    """
    nu = np.asarray(frequency, dtype=float)
    if np.any(nu < _ABSORPTION_FREQUENCY_RANGE[0]) or np.any(
        nu > _ABSORPTION_FREQUENCY_RANGE[1]
    ):
        raise ValueError(
            f"frequency outside absorption model range {_ABSORPTION_FREQUENCY_RANGE}"
        )
    if not (_ABSORPTION_TEMPERATURE_RANGE[0] <= temperature <= _ABSORPTION_TEMPERATURE_RANGE[1]):
        raise ValueError(f"temperature {temperature} K outside model range")
    if not (0.0 <= relative_humidity <= 100.0):
        raise ValueError("relative humidity must lie in [0, 100] percent")
    if not (_ABSORPTION_PRESSURE_RANGE[0] <= pressure <= _ABSORPTION_PRESSURE_RANGE[1]):
        raise ValueError(f"pressure {pressure} Pa outside model range")

    t = temperature
    pr = pressure / _REFERENCE_PRESSURE
    tau = t / _T_REFERENCE
    # Saturation vapour pressure ratio and molar water concentration in percent.
    psat_ratio = 10.0 ** (-6.8346 * (_T_TRIPLE / t) ** 1.261 + 4.6151)
    h = relative_humidity * psat_ratio / pr
    fr_oxygen = pr * (24.0 + 4.04e4 * h * (0.02 + h) / (0.391 + h))
    fr_nitrogen = pr * tau ** (-0.5) * (9.0 + 280.0 * h * math.exp(-4.17 * (tau ** (-1.0 / 3.0) - 1.0)))
    alpha = (
        8.686
        * nu**2
        * tau**0.5
        * (
            1.84e-11 / pr
            + tau**-3.0
            * (
                0.01275 * math.exp(-2239.1 / t) / (fr_oxygen + nu**2 / fr_oxygen)
                + 0.1068 * math.exp(-3352.0 / t) / (fr_nitrogen + nu**2 / fr_nitrogen)
            )
        )
    )
    return alpha if np.ndim(alpha) else float(alpha)


def atmospheric_attenuation(path: PropagationPath, frequency, absorption_table=None):
    """Pressure attenuation factor gamma(nu) >= 1 over the path length.

    gamma = 10^(alpha L / 20) with alpha the absorption coefficient in
    dB/m from the humid-air model, or interpolated from a user-supplied
    (frequency_hz, alpha_db_per_m) table.
    """
    nu = np.asarray(frequency, dtype=float)
    if absorption_table is not None:
        table_f, table_alpha = absorption_table
        alpha = np.interp(nu, np.asarray(table_f, float), np.asarray(table_alpha, float))
    else:
        alpha = air_absorption_db_per_m(
            nu,
            temperature=path.temperature,
            relative_humidity=path.relative_humidity,
            pressure=path.pressure,
        )
    result = 10.0 ** (np.asarray(alpha) * path.distance / 20.0)
    return result if np.ndim(result) else float(result)


def pressure_at_sensor(pzt_pressure_value, diffraction, attenuation):
    """Pressure reaching the sensor: P_sensor = c * gamma^-1 * P_pzt."""
    attenuation = np.asarray(attenuation, dtype=float)
    if np.any(attenuation < 1.0 - 1e-12):
        raise ValueError("attenuation factor must be >= 1")
    result = np.asarray(diffraction, float) * np.asarray(pzt_pressure_value, float) / attenuation
    return result if np.ndim(result) else float(result)


def responsivity(measured: SpectrumSeries, applied: SpectrumSeries) -> SpectrumSeries:
    """Pointwise sensor responsivity, measured voltage over applied pressure.

    The applied spectrum is linearly resampled onto the measured grid if
    the axes differ (restricted to the overlapping range).  Points with
    zero applied pressure are excluded.

    Raises:
        ValueError: applied pressure is zero everywhere.
    """
    if len(measured) == len(applied) and np.allclose(
        measured.frequencies, applied.frequencies, rtol=1e-12
    ):
        freqs = measured.frequencies
        volts = measured.values
        pressure = applied.values
    else:
        lo = max(measured.frequencies[0], applied.frequencies[0])
        hi = min(measured.frequencies[-1], applied.frequencies[-1])
        keep = (measured.frequencies >= lo) & (measured.frequencies <= hi)
        if not np.any(keep):
            raise ValueError("measured and applied spectra do not overlap in frequency")
        freqs = measured.frequencies[keep]
        volts = measured.values[keep]
        pressure = applied.interpolated(freqs).values
    nonzero = np.asarray(pressure) != 0.0
    if not np.any(nonzero):
        raise ValueError("applied pressure is zero everywhere")
    return SpectrumSeries(
        np.asarray(freqs)[nonzero],
        np.asarray(volts)[nonzero] / np.asarray(pressure)[nonzero],
        unit="V/Pa",
    )
