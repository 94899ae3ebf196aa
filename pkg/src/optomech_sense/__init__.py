"""Cavity optomechanical acoustic sensor modeling toolkit.

End-to-end analytic model of a suspended-microdisk acoustic sensor:
device geometry and gas environment in, noise-equivalent pressure
spectra, calibration chains and application-level detection limits out,
with a stochastic time-domain simulator serving as the independent
cross-check of the frequency-domain results.
"""

__version__ = "0.1.0"

from .core import (
    BOLTZMANN,
    GasEnvironment,
    MechanicalMode,
    OpticalCavity,
    SensorGeometry,
    SpectrumSeries,
    angular_to_cyclic,
    cyclic_to_angular,
    derive_geometry,
)
from .response import Coupling

__all__ = [
    "BOLTZMANN",
    "Coupling",
    "GasEnvironment",
    "MechanicalMode",
    "OpticalCavity",
    "SensorGeometry",
    "SpectrumSeries",
    "angular_to_cyclic",
    "cyclic_to_angular",
    "derive_geometry",
    "__version__",
]
