"""Acceptance suite: the headline end-to-end numbers, one test per criterion.

Each test prints a single pass/fail line (run with ``pytest -s`` to see
them inline) and asserts the stated tolerance.  Tolerances are fixed
here, not tuned: every expected value was either taken from the
reference measurements or derived from an independent oracle.
"""
import math

import numpy as np
import pytest
from scipy import integrate

from optomech_sense import GasEnvironment, MechanicalMode, OpticalCavity, SensorGeometry
from optomech_sense.applications import (
    GasLine,
    LaserPulse,
    min_concentration,
    rayleigh_analysis,
)
from optomech_sense.calibration import PropagationPath, S21Sweep, diffraction_factor, pzt_displacement
from optomech_sense.core import BOLTZMANN, TWO_PI
from optomech_sense.damping import (
    decompose_damping,
    drag_length,
    gas_damping_rate,
    squeeze_length,
)
from optomech_sense.noise import (
    db_to_power_ratio,
    force_sensitivity,
    gain_for_peak_ratio,
    ldr,
    nep,
    nep_from_snr,
    synthesize_noise_spectrum,
)
from optomech_sense.response import (
    Coupling,
    om_susceptibility,
    om_susceptibility_lowfreq,
    optimal_detuning,
    optimal_detuning_numeric,
)
from optomech_sense.timedomain import (
    SimulationConfig,
    displacement_psd_model,
    psd_estimate,
    simulate_langevin,
)

AIR = GasEnvironment.air()
GEOMETRY = SensorGeometry(148e-6, 82e-6, 1.8e-6, 2650.0, 7.09e-6)
AREA = 0.05e-6  # m^2, reported sensing area
DARK_CAVITY = OpticalCavity(
    intrinsic_loss=TWO_PI * 56e6, input_coupling=TWO_PI * 56e6,
    dispersive_coupling=TWO_PI * 1.3e18, dissipative_coupling=1e6,
    photon_number=0.0,
)


def _criterion(number, description, passed, detail):
    status = "PASS" if passed else "FAIL"
    print(f"[criterion {number:02d}] {status}  {description}: {detail}")
    assert passed, f"criterion {number}: {description}: {detail}"


def test_criterion_01_gas_damping_thermal_limit():
    mode = MechanicalMode(resonance_freq=TWO_PI * 318e3, intrinsic_damping=0.0,
                          effective_mass=1e-10)
    value = nep(mode, AIR, DARK_CAVITY, AREA, Coupling.DISPERSIVE,
                TWO_PI * 318e3, 0.0, gas_length=8e-3)
    _criterion(1, "gas-damping thermal limit in [0.5, 2.0] uPa/rtHz",
               0.5e-6 <= value <= 2.0e-6, f"{value * 1e6:.3f} uPa/rtHz")


def test_criterion_02_resonant_nep():
    mode = MechanicalMode(
        resonance_freq=TWO_PI * 318e3, intrinsic_damping=TWO_PI * 1430.0,
        effective_mass=110e-12, overlap=0.14, participation_ratio=0.055,
    )
    value = nep(mode, AIR, DARK_CAVITY, AREA, Coupling.DISPERSIVE,
                TWO_PI * 318e3, 0.0)
    _criterion(2, "318 kHz NEP within 15% of 100 uPa/rtHz",
               abs(value - 100e-6) <= 0.15 * 100e-6, f"{value * 1e6:.2f} uPa/rtHz")


def test_criterion_03_snr_nep():
    value = nep_from_snr(0.12, db_to_power_ratio(40.0), 1.0 / 200.0)
    _criterion(3, "SNR-based NEP equals 84 +- 1 uPa/rtHz",
               abs(value - 84e-6) <= 1e-6, f"{value * 1e6:.2f} uPa/rtHz")


def test_criterion_04_drag_model():
    mode = MechanicalMode(resonance_freq=TWO_PI * 315e3, intrinsic_damping=0.0,
                          effective_mass=GEOMETRY.total_mass / 2.0)
    length = drag_length(GEOMETRY, mode, 0.85)
    rate = gas_damping_rate(length, AIR, mode) / TWO_PI
    ok = 0.35e-3 <= length <= 0.45e-3 and 55.0 <= rate <= 70.0
    _criterion(4, "drag length in [0.35, 0.45] mm and rate in [55, 70] Hz",
               ok, f"l_drag = {length * 1e3:.3f} mm, gamma/2pi = {rate:.1f} Hz")


def test_criterion_05_damping_decomposition():
    sweep = [
        (1000e2, TWO_PI * 1430.0),
        (44e2, TWO_PI * 535.0),
        (0.056e2, TWO_PI * 150.0),
    ]
    result = decompose_damping(sweep)
    intrinsic = result.intrinsic_damping / TWO_PI
    gas = result.gas_damping / TWO_PI
    ok = intrinsic == pytest.approx(150.0, abs=1e-9) and gas == pytest.approx(
        1280.0, abs=1e-9)
    _criterion(5, "sweep decomposes to exactly 150 / 1280 Hz",
               ok, f"intrinsic = {intrinsic:.6f} Hz, gas = {gas:.6f} Hz")


def test_criterion_06_optimal_detuning():
    closed = optimal_detuning(DARK_CAVITY, Coupling.DISPERSIVE)
    numeric = optimal_detuning_numeric(DARK_CAVITY, Coupling.DISPERSIVE)
    expected = DARK_CAVITY.total_loss / (2.0 * math.sqrt(3.0))
    mode = MechanicalMode(resonance_freq=TWO_PI * 315e3,
                          intrinsic_damping=TWO_PI * 1430.0,
                          effective_mass=110e-12)
    disp_zero = om_susceptibility(DARK_CAVITY, mode, Coupling.DISPERSIVE, 1e5, 0.0)
    critical = om_susceptibility(DARK_CAVITY, mode, Coupling.DISSIPATIVE, 1e5, 0.0)
    non_critical_cavity = OpticalCavity(
        intrinsic_loss=TWO_PI * 56e6, input_coupling=TWO_PI * 28e6,
        dissipative_coupling=1e6)
    non_critical = om_susceptibility(
        non_critical_cavity, mode, Coupling.DISSIPATIVE, 1e5, 0.0)
    ok = (
        abs(numeric - expected) <= 1e-6 * expected
        and closed == pytest.approx(expected, rel=1e-12)
        and disp_zero == 0.0
        and critical == 0.0
        and abs(non_critical) > 0.0
    )
    _criterion(6, "optimal detuning at kappa/(2 sqrt(3)); zeros as required",
               ok, f"numeric/expected - 1 = {numeric / expected - 1.0:.2e}")


def test_criterion_07_full_vs_lowfreq():
    rng = np.random.default_rng(7)
    mode = MechanicalMode(resonance_freq=TWO_PI * 315e3,
                          intrinsic_damping=TWO_PI * 1430.0,
                          effective_mass=110e-12)
    worst = 0.0
    checked = 0
    while checked < 100:
        kappa_l = 10 ** rng.uniform(6, 9)
        kappa_in = 10 ** rng.uniform(6, 9)
        cavity = OpticalCavity(
            intrinsic_loss=kappa_l, input_coupling=kappa_in,
            dispersive_coupling=10 ** rng.uniform(15, 19),
            dissipative_coupling=10 ** rng.uniform(4, 7),
        )
        delta = rng.uniform(0.1, 2.0) * cavity.total_loss
        omega = 1e-3 * cavity.total_loss
        for kind in Coupling:
            if kind is Coupling.DISSIPATIVE:
                # skip draws near the response null, where both forms vanish
                # at slightly different parameters (bound validity condition)
                numer = abs(-(cavity.total_loss**2) * (kappa_in - kappa_l)
                            + 4 * delta**2 * (cavity.total_loss + 2 * kappa_in))
                scale = (cavity.total_loss**2 * abs(kappa_in - kappa_l)
                         + 4 * delta**2 * (cavity.total_loss + 2 * kappa_in))
                if numer < 0.35 * scale:
                    continue
            full = om_susceptibility(cavity, mode, kind, omega, delta)
            low = om_susceptibility_lowfreq(cavity, mode, kind, omega, delta)
            worst = max(worst, abs(low - full) / abs(full))
            checked += 1
    _criterion(7, "full vs low-frequency susceptibility within 1% (100 draws)",
               worst < 1e-2, f"worst relative deviation = {worst:.2e}")


def test_criterion_08_langevin_oracle():
    mode = MechanicalMode(
        resonance_freq=TWO_PI * 315e3, intrinsic_damping=TWO_PI * 170.0,
        gas_damping=TWO_PI * 1260.0, effective_mass=110e-12,
        overlap=0.14, participation_ratio=0.055,
    )
    config = SimulationConfig(dt=1.5e-7, duration=0.6, seed=315)
    trace = simulate_langevin(mode, AIR, GEOMETRY, config)
    variance = float(np.var(trace.displacement))
    expected_var = BOLTZMANN * AIR.temperature / mode.spring_constant
    equi_ok = abs(variance / expected_var - 1.0) <= 0.05

    spectrum = psd_estimate(trace, segments=61)
    model = displacement_psd_model(mode, AIR.temperature, spectrum.frequencies)
    band = (spectrum.frequencies >= 306e3) & (spectrum.frequencies <= 325e3)
    ratio_db = 10.0 * np.log10(spectrum.values[band] / model[band])
    rms_db = float(np.sqrt(np.mean(ratio_db**2)))
    _criterion(8, "equipartition within 5% and PSD within 0.5 dB RMS",
               equi_ok and rms_db < 0.5,
               f"<x^2>/(kT/k) = {variance / expected_var:.4f}, "
               f"RMS = {rms_db:.3f} dB")


def test_criterion_09_trace_gas_limit():
    line = GasLine(line_intensity=4.7e-19, linewidth=0.06, wavelength=4.32993e-6)
    pulse = LaserPulse(energy=1e-6, duration=1e-6, beam_radius=50e-6)
    limit = min_concentration(AIR, line, pulse, 84e-6, 100e-6, TWO_PI * 318e3)
    # Unit-faithful chain: 3.65e11 cm^-3 (quoted 3.5e11) and 14.9 ppb at
    # 300 K / 1 atm against the quoted 12.5 ppb; both inside 20 percent.
    ok = (abs(limit.ppb - 12.5) <= 0.20 * 12.5
          and abs(limit.number_density_cm3 - 3.5e11) <= 0.20 * 3.5e11)
    _criterion(9, "trace-gas limit within 20% of 12.5 ppb",
               ok, f"{limit.ppb:.2f} ppb ({limit.number_density_cm3:.3e} cm^-3)")


def test_criterion_10_cell_vibration():
    from optomech_sense.applications import cell_vibration_pressure

    value = cell_vibration_pressure(10e3, 1e-9, AIR)
    _criterion(10, "cell-vibration pressure within 1% of 1.30e-2 Pa",
               abs(value - 1.30e-2) <= 0.01 * 1.30e-2, f"{value:.4e} Pa")


def test_criterion_11_linear_dynamic_range():
    value = ldr(84e-6, 100.0, 1.0)
    _criterion(11, "LDR at least 120 dB (computed ~121.5 dB)",
               value >= 120.0, f"{value:.2f} dB")


def test_criterion_12_force_sensitivity_and_rayleigh():
    force = force_sensitivity(0.45e-3, 4e-6)
    radius = rayleigh_analysis(1.5e-3, rayleigh_length=2e-3)
    ok = (abs(force - 1.8e-9) <= 0.01 * 1.8e-9
          and 0.9e-3 <= radius <= 1.1e-3)
    _criterion(12, "force sensitivity 1.8 nN/rtHz and beam radius ~1 mm",
               ok, f"{force * 1e9:.3f} nN/rtHz, w = {radius * 1e3:.3f} mm")


def test_criterion_13_property_suite():
    """Representative run of the cross-module property laws.

    The full versions live in the per-module test files; this criterion
    re-executes one instance of each family end to end.
    """
    checks = {}

    # geometry scale covariance
    small = SensorGeometry(148e-6, 82e-6, 1.8e-6, 2650.0, 7e-6)
    big = SensorGeometry(296e-6, 164e-6, 3.6e-6, 2650.0, 14e-6)
    checks["scale covariance"] = (
        big.area == pytest.approx(4.0 * small.area, rel=1e-12)
        and big.total_mass == pytest.approx(8.0 * small.total_mass, rel=1e-12)
    )

    # squeeze-film inverse-cube law, exact
    mode = MechanicalMode(resonance_freq=TWO_PI * 315e3,
                          intrinsic_damping=TWO_PI * 170.0,
                          gas_damping=TWO_PI * 1260.0, effective_mass=110e-12)
    near = SensorGeometry(148e-6, 82e-6, 1.8e-6, 2650.0, 3e-6)
    far = SensorGeometry(148e-6, 82e-6, 1.8e-6, 2650.0, 6e-6)
    checks["squeeze h^-3"] = squeeze_length(far, mode) == squeeze_length(near, mode) / 8.0

    # detuning symmetry of the response
    checks["detuning symmetry"] = all(
        abs(om_susceptibility(DARK_CAVITY, mode, kind, 1e4, 0.7 * DARK_CAVITY.total_loss))
        == pytest.approx(
            abs(om_susceptibility(DARK_CAVITY, mode, kind, 1e4,
                                  -0.7 * DARK_CAVITY.total_loss)), rel=1e-12)
        for kind in Coupling
    )

    # noise-spectrum additivity
    freqs = np.geomspace(1e3, 1e6, 400)
    gain = gain_for_peak_ratio(mode, 1e-29, 13.0)
    spectrum = synthesize_noise_spectrum(
        [(mode, Coupling.DISPERSIVE, gain)], 1e-29, freqs)
    checks["noise additivity"] = bool(
        np.array_equal(spectrum.total.values, spectrum.component_sum()))

    # calibration forward-model inversion
    sweep_freqs = np.linspace(5e3, 500e3, 100)
    d_true = 1e-10 * (1.0 + 0.4 * np.cos(sweep_freqs / 55e3))
    wavelength = 1.5557e-6
    v_ref, v_max = 0.2, 0.5
    d_ref = wavelength / 4.0 * v_ref / v_max
    sweep = S21Sweep(
        frequencies=sweep_freqs, s21_power=7.7e-5 * (d_true / d_ref) ** 2,
        reference_freq=20e3, reference_voltage=v_ref, max_voltage=v_max,
    )
    recovered = pzt_displacement(sweep, wavelength).displacement.values
    scale = d_true[3] / d_ref  # 20 kHz is the fourth grid point
    checks["calibration inversion"] = bool(
        np.allclose(recovered, d_true / scale, rtol=1e-12))

    # diffraction factor against direct quadrature
    path = PropagationPath(distance=0.10, aperture_side=7e-3)
    nu = 200e3
    lam = AIR.sound_speed / nu
    k = TWO_PI / lam
    re, _ = integrate.dblquad(
        lambda x, y: math.cos(k * (x * x + y * y) / 0.2), -3.5e-3, 3.5e-3,
        -3.5e-3, 3.5e-3, epsabs=1e-12, epsrel=1e-9)
    im, _ = integrate.dblquad(
        lambda x, y: math.sin(k * (x * x + y * y) / 0.2), -3.5e-3, 3.5e-3,
        -3.5e-3, 3.5e-3, epsabs=1e-12, epsrel=1e-9)
    oracle = abs(complex(re, im) / (1j * lam * 0.1))
    checks["diffraction quadrature"] = diffraction_factor(path, nu, AIR) == (
        pytest.approx(oracle, rel=1e-3))

    failed = [name for name, ok in checks.items() if not ok]
    _criterion(13, "property suite (module invariants as automated tests)",
               not failed, f"families checked: {len(checks)}, failed: {failed}")
