"""Stochastic time-domain simulation of the driven, damped mechanical mode.

This is the independent oracle for the frequency-domain modules: a
Langevin simulation of

    m x'' + m gamma_m x' + k x = F_thermal(t) + r zeta A P_D(t)

The update is an exact propagator for the linear SDE (the
Ornstein-Uhlenbeck update applied to the (x, v) pair), so there is no
step-size bias: each step draws the exact Gaussian increment of the
continuous process.  The sinusoidal acoustic drive is added through the
exact particular solution, and the homogeneous initial condition is
adjusted accordingly.  Randomness comes from numpy's PCG64 generator, so
a fixed seed reproduces traces bit for bit within one installation.

Thermal force discretisation: the stationary covariance of the scaled
state (omega_m x, v) is (k_B T / m) I, and the per-step increment
covariance is its exact complement (k_B T / m)(I - Phi Phi^T).  This is
equivalent to a white force of single-sided density 4 k_B T m gamma_m
(gamma_m angular) band-limited to the step Nyquist frequency, the
density that satisfies both equipartition and the fluctuation-dissipation
theorem; see docs/conventions.md for the derivation and for how it maps
onto the cyclic-convention densities used in sensitivity reporting.
"""
from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import signal as _signal

from .core import BOLTZMANN, TWO_PI, SpectrumSeries
from .errors import IntegrationDivergedError
from .response import Coupling, _lowfreq_detuning_weight, mech_susceptibility

# Resolution bound on the step: a twentieth of the mechanical period and of
# the damping time, whichever is shorter.
DT_SAFETY_FACTOR = 0.05


@dataclass(frozen=True)
class DriveSettings:
    """Continuous-wave acoustic drive tone."""

    amplitude: float = 0.0  # Pa
    frequency: float = 0.0  # rad/s
    phase: float = 0.0  # rad

    def __post_init__(self):
        if self.amplitude < 0.0:
            raise ValueError("drive amplitude must be >= 0")
        if self.frequency < 0.0:
            raise ValueError("drive frequency must be >= 0")


@dataclass(frozen=True)
class SimulationConfig:
    """Time-domain run settings.

    A duration of at least ~100 mechanical periods is recommended for
    spectral estimates; the step must satisfy
    dt <= 0.05 * min(2 pi / omega_m, 1 / gamma_m).
    """

    dt: float
    duration: float
    seed: int = 0
    drive: DriveSettings = field(default_factory=DriveSettings)
    thermal: bool = True
    initial_displacement: float = 0.0
    initial_velocity: float = 0.0

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.duration < self.dt:
            raise ValueError("duration must cover at least one step")


@dataclass(frozen=True)
class TimeTrace:
    """Uniformly sampled displacement record, optionally with detector signal."""

    times: np.ndarray  # s
    displacement: np.ndarray  # m
    detector_signal: Optional[np.ndarray] = None  # arbitrary units
    seed: int = 0

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        x = np.asarray(self.displacement, dtype=float)
        if len(t) != len(x):
            raise ValueError("times and displacement must have equal length")
        if len(t) < 2:
            raise ValueError("a trace needs at least two samples")
        steps = np.diff(t)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("time step must be uniform")
        if self.detector_signal is not None and len(self.detector_signal) != len(t):
            raise ValueError("detector_signal length must match times")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "displacement", x)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])

    @property
    def sample_rate(self):
        return 1.0 / self.dt


def _scaled_propagator(omega0, gamma, dt):
    """Exact exp(A dt) for the balanced state (omega0 x, v).

    A = [[0, w0], [-w0, -gamma]]; complex arithmetic covers the
    overdamped case, imaginary parts cancel to rounding.
    """
    lam = 0.5 * gamma
    wd = cmath.sqrt(complex(omega0 * omega0 - lam * lam))
    decay = cmath.exp(-lam * dt)
    if abs(wd) * dt < 1e-12:
        cos_term = 1.0 + 0j
        sin_over_wd = dt * (1.0 + 0j)
    else:
        cos_term = cmath.cos(wd * dt)
        sin_over_wd = cmath.sin(wd * dt) / wd
    p11 = (decay * (cos_term + lam * sin_over_wd)).real
    p12 = (decay * omega0 * sin_over_wd).real
    p21 = -p12
    p22 = (decay * (cos_term - lam * sin_over_wd)).real
    return np.array([[p11, p12], [p21, p22]])


def _particular_solution(mode, force_amplitude, drive, times):
    """Exact steady-state response to F0 cos(w t + phi): (x_p, v_p)."""
    chi = mech_susceptibility(mode, drive.frequency)
    amp = chi * force_amplitude * cmath.exp(-1j * drive.phase)
    phase = np.exp(-1j * drive.frequency * np.asarray(times))
    x_p = (amp * phase).real
    v_p = (-1j * drive.frequency * amp * phase).real
    return x_p, v_p


def max_stable_dt(mode):
    """Largest step satisfying the resolution bound for this mode."""
    period = TWO_PI / mode.resonance_freq
    bound = period
    if mode.total_damping > 0.0:
        bound = min(bound, 1.0 / mode.total_damping)
    return DT_SAFETY_FACTOR * bound


def simulate_langevin(mode, gas, geometry, config: SimulationConfig) -> TimeTrace:
    """Integrate the mechanical Langevin equation exactly, step by step.

    The acoustic drive force is r * zeta * P_D * A with A the sensor
    area.  Deterministic for a given seed.

    Raises:
        IntegrationDivergedError: the step exceeds the resolution bound
            (carries a suggested dt) or the trajectory left the expected
            amplitude range.
    """
    dt_bound = max_stable_dt(mode)
    if config.dt > dt_bound:
        raise IntegrationDivergedError(
            f"dt = {config.dt:.3e} s exceeds the resolution bound {dt_bound:.3e} s "
            "for this mode",
            suggested_dt=dt_bound,
        )
    gamma_m = mode.total_damping
    if config.thermal and gamma_m <= 0.0:
        raise ValueError("a thermal bath requires nonzero damping")

    n = int(round(config.duration / config.dt)) + 1
    times = np.arange(n) * config.dt
    omega0 = mode.resonance_freq
    phi = _scaled_propagator(omega0, gamma_m, config.dt)
    trace_phi = phi[0, 0] + phi[1, 1]
    det_phi = phi[0, 0] * phi[1, 1] - phi[0, 1] * phi[1, 0]

    force_amplitude = (
        mode.participation_ratio * mode.overlap * config.drive.amplitude * geometry.area
    )
    if force_amplitude > 0.0:
        x_part, v_part = _particular_solution(mode, force_amplitude, config.drive, times)
    else:
        x_part = v_part = np.zeros(n)

    # Homogeneous initial condition in the balanced frame (w0 x, v).
    y0 = omega0 * (config.initial_displacement - x_part[0])
    w0 = config.initial_velocity - v_part[0]

    rng = np.random.default_rng(config.seed)
    if config.thermal:
        scale = BOLTZMANN * gas.temperature / mode.effective_mass
        step_cov = scale * (np.eye(2) - phi @ phi.T)
        chol = np.linalg.cholesky(step_cov)
        noise = rng.standard_normal((n - 1, 2)) @ chol.T
        a, b = noise[:, 0], noise[:, 1]
    else:
        a = b = np.zeros(n - 1)

    y = np.empty(n)
    y[0] = y0
    y[1] = phi[0, 0] * y0 + phi[0, 1] * w0 + a[0]
    if n > 2:
        # The pair recursion collapses to AR(2) on the position component.
        forcing = a[1:] + phi[0, 1] * b[:-1] - phi[1, 1] * a[:-1]
        zi = _signal.lfiltic([1.0], [1.0, -trace_phi, det_phi], y=[y[1], y[0]])
        y[2:] = _signal.lfilter([1.0], [1.0, -trace_phi, det_phi], forcing, zi=zi)[0]

    x = y / omega0 + x_part

    if not np.all(np.isfinite(x)):
        raise IntegrationDivergedError(
            "trajectory became non-finite", suggested_dt=dt_bound
        )
    expected = abs(config.initial_displacement) + np.max(np.abs(x_part), initial=0.0)
    if config.thermal:
        expected += 40.0 * np.sqrt(BOLTZMANN * gas.temperature / mode.spring_constant)
    if expected > 0.0 and np.max(np.abs(x)) > 1e6 * expected:
        raise IntegrationDivergedError(
            "trajectory energy blew up beyond the expected range",
            suggested_dt=dt_bound,
        )
    return TimeTrace(times=times, displacement=x, seed=config.seed)


def psd_estimate(trace: TimeTrace, segments=8, signal="displacement") -> SpectrumSeries:
    """Welch estimate of the single-sided power spectral density.

    The trace is split into ``segments`` pieces (Hann window, 50 percent
    overlap between successive half-shifted segments, density scaling),
    so the integral of the estimate over frequency matches the signal
    variance.

    Args:
        trace: input record.
        segments: number of base segments (>= 1).
        signal: "displacement" or "detector".

    Returns:
        SpectrumSeries in units^2/Hz from DC to Nyquist.
    """
    if segments < 1:
        raise ValueError(f"segments must be >= 1, got {segments}")
    if signal == "displacement":
        data = trace.displacement
        unit = "m^2/Hz"
    elif signal == "detector":
        if trace.detector_signal is None:
            raise ValueError("trace has no detector signal")
        data = trace.detector_signal
        unit = "detector_units^2/Hz"
    else:
        raise ValueError(f"unknown signal selector: {signal!r}")
    nperseg = len(data) // segments
    if nperseg < 2:
        raise ValueError(
            f"{segments} segments leave {nperseg} samples per segment; need >= 2"
        )
    freqs, psd = _signal.welch(
        data,
        fs=trace.sample_rate,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg // 2,
        detrend="constant",
        scaling="density",
    )
    return SpectrumSeries(freqs, psd, unit=unit)


def displacement_psd_model(mode, temperature, frequencies):
    """Analytic displacement density of the thermal mode, m^2/Hz.

    S_x(f) = 4 k_B T m gamma_m |chi_m(2 pi f)|^2 with gamma_m angular:
    the single-sided density whose integral returns k_B T / k
    (equipartition).
    """
    s_force = 4.0 * BOLTZMANN * temperature * mode.effective_mass * mode.total_damping
    chi = mech_susceptibility(mode, TWO_PI * np.asarray(frequencies, dtype=float))
    return s_force * np.abs(chi) ** 2


def transduce(trace: TimeTrace, cavity, kind: Coupling, detuning=None, mode=None) -> TimeTrace:
    """Map displacement to a detector signal with the quasi-static gain.

    detector(t) = sqrt(N) * K(Delta, kind) * x(t), where K is the
    zero-frequency limit of the optical transduction prefactor.  Valid
    for mechanical frequencies far below the cavity linewidth; a warning
    is emitted when a mode is supplied that violates omega_m << kappa_0.
    """
    delta = cavity.detuning if detuning is None else detuning
    if mode is not None and mode.resonance_freq > 0.1 * cavity.total_loss:
        warnings.warn(
            "quasi-static transduction assumes omega_m << kappa_0; "
            f"got omega_m / kappa_0 = {mode.resonance_freq / cavity.total_loss:.2f}",
            stacklevel=2,
        )
    gain = np.sqrt(cavity.photon_number) * _lowfreq_detuning_weight(cavity, kind, delta)
    detector = float(np.real(gain)) * trace.displacement
    return TimeTrace(
        times=trace.times,
        displacement=trace.displacement,
        detector_signal=detector,
        seed=trace.seed,
    )
