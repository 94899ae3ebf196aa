import math

import pytest

from optomech_sense import GasEnvironment, MechanicalMode, OpticalCavity, SensorGeometry

TWO_PI = 2.0 * math.pi


@pytest.fixture
def device_geometry():
    """Spoked-disk geometry of the reference sensor."""
    return SensorGeometry(
        major_radius=148e-6,
        minor_radius=82e-6,
        thickness=1.8e-6,
        density=2650.0,
        substrate_gap=7.09e-6,
    )


@pytest.fixture
def air():
    return GasEnvironment.air()


@pytest.fixture
def flapping_mode():
    """315 kHz flapping mode, atmospheric damping split 170 + 1260 Hz."""
    return MechanicalMode(
        resonance_freq=TWO_PI * 315e3,
        intrinsic_damping=TWO_PI * 170.0,
        gas_damping=TWO_PI * 1260.0,
        effective_mass=110e-12,
        overlap=0.14,
        participation_ratio=0.055,
    )


@pytest.fixture
def critical_cavity():
    """112 MHz loaded linewidth at critical coupling."""
    return OpticalCavity(
        intrinsic_loss=TWO_PI * 56e6,
        input_coupling=TWO_PI * 56e6,
        dispersive_coupling=TWO_PI * 1.3e18,
        dissipative_coupling=1.0e6,
        photon_number=1e8,
        wavelength=1.5557e-6,
    )


@pytest.fixture
def undercoupled_cavity():
    """Deeply undercoupled cavity used for the dissipative response shape."""
    return OpticalCavity(
        intrinsic_loss=4e7,
        input_coupling=0.5e6,
        dispersive_coupling=TWO_PI * 1.3e18,
        dissipative_coupling=1.0e6,
        photon_number=1e8,
    )
