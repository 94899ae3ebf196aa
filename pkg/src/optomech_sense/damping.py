"""Fluidic damping of the suspended disk: viscous drag and squeeze film.

Characteristic lengths follow the cyclic convention: every length ``l``
returned here is already divided by 2*pi, so that the cyclic gas damping
rate is simply ``gamma_cyc = mu * l / m`` and sensitivities come out per
sqrt(cyclic Hz).  :func:`gas_damping_rate` converts back to the angular
rates stored on :class:`~optomech_sense.core.MechanicalMode`.

Modeshape structure is folded in approximately by replacing the full
plate area with the area of the moving part, ``A -> A * m / M``, which
for the squeeze film amounts to the modified radius ratio ``beta'``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import TWO_PI, GasEnvironment, MechanicalMode, SensorGeometry
from .errors import DegenerateModeError, InvalidModeError

DEFAULT_DRAG_COEFFICIENT = 0.85  # vertically moving disk; 1 for a sphere, 0.567 in-plane

# Below this radius ratio the log term of the film factor is evaluated as its
# beta -> 0 limit (exactly 1).  The raw expression converges to 1 only
# logarithmically, so the guard pins the limit value for vanishing bores.
FILM_FACTOR_GUARD = 1e-4


def annulus_film_factor(beta):
    """Squeeze-film geometry factor G(beta) for an annular plate.

    G(beta) = 1 - beta^4 + (1 - beta^2)^2 / ln(beta), with G(0) = 1 taken
    as the defining limit for beta below :data:`FILM_FACTOR_GUARD`.

    Args:
        beta: inner-to-outer radius ratio in [0, 1).
    """
    if not (0.0 <= beta < 1.0):
        raise ValueError(f"beta must lie in [0, 1), got {beta}")
    if beta < FILM_FACTOR_GUARD:
        return 1.0
    b2 = beta * beta
    return 1.0 - b2 * b2 + (1.0 - b2) ** 2 / math.log(beta)


def _moving_mass_fraction(geometry: SensorGeometry, mode: MechanicalMode):
    fraction = mode.effective_mass / geometry.total_mass
    if fraction > 1.0 + 1e-9:
        raise InvalidModeError(
            f"effective mass {mode.effective_mass:.3e} kg exceeds total mass "
            f"{geometry.total_mass:.3e} kg"
        )
    return min(fraction, 1.0)


def drag_length(geometry, mode, drag_coefficient=DEFAULT_DRAG_COEFFICIENT):
    """Characteristic length for viscous drag on the moving part of the disk.

    The drag force on a thin plate is -6*pi*xi*mu*sqrt(A') * velocity with
    A' = A*m/M the moving area; dividing by 2*pi for the cyclic convention
    leaves l_drag = 3*xi*sqrt(A*m/M).

    Args:
        geometry: sensor geometry supplying area and total mass.
        mode: mechanical mode supplying the effective mass.
        drag_coefficient: dimensionless shape factor xi (> 0).

    Returns:
        Cyclic-convention drag length (m).
    """
    if drag_coefficient <= 0.0:
        raise ValueError(f"drag_coefficient must be > 0, got {drag_coefficient}")
    fraction = _moving_mass_fraction(geometry, mode)
    return 3.0 * drag_coefficient * math.sqrt(geometry.area * fraction)


def modified_beta(geometry: SensorGeometry, mode: MechanicalMode):
    """Radius ratio of the moving annulus, beta' = sqrt(1 - (1 - beta^2) m/M)."""
    fraction = _moving_mass_fraction(geometry, mode)
    beta = geometry.beta_ratio
    value = math.sqrt(max(1.0 - (1.0 - beta * beta) * fraction, 0.0))
    if value >= 1.0:
        raise DegenerateModeError("no moving area: modified radius ratio reached 1")
    return value


def squeeze_length(geometry, mode):
    """Characteristic length for squeeze-film damping above a flat substrate.

    l_squeeze = 3*pi*R^4*G(beta') / (2 h^3), divided by 2*pi for the cyclic
    convention, i.e. 3*R^4*G(beta') / (4 h^3).  Scales as h^-3 in the gap.

    Returns:
        Cyclic-convention squeeze-film length (m).
    """
    beta_prime = modified_beta(geometry, mode)
    factor = annulus_film_factor(beta_prime)
    h = geometry.substrate_gap
    # h*h*h keeps the h^-3 scaling exact in floating point (2h cubes to 8 h^3).
    return 3.0 * geometry.major_radius**4 * factor / (4.0 * h * h * h)


def gas_damping_rate(length, gas: GasEnvironment, mode: MechanicalMode):
    """Angular gas damping rate for a cyclic-convention characteristic length.

    gamma_gas / 2*pi = mu * l / m, hence the returned angular rate is
    2*pi * mu * l / m.
    """
    if length < 0.0:
        raise ValueError(f"length must be >= 0, got {length}")
    return TWO_PI * gas.viscosity * length / mode.effective_mass


def crossover_height(geometry, mode, drag_coefficient=DEFAULT_DRAG_COEFFICIENT):
    """Substrate gap at which squeeze-film and drag lengths are equal.

    h* = (R^4 G(beta') / (4 xi sqrt(A m / M)))^(1/3).  For gaps below h*
    the squeeze film dominates the gas damping budget.
    """
    l_drag = drag_length(geometry, mode, drag_coefficient)
    beta_prime = modified_beta(geometry, mode)
    factor = annulus_film_factor(beta_prime)
    fraction = _moving_mass_fraction(geometry, mode)
    h_star = (
        geometry.major_radius**4
        * factor
        / (4.0 * drag_coefficient * math.sqrt(geometry.area * fraction))
    ) ** (1.0 / 3.0)
    # Consistency of the closed form with the two length formulas.
    probe = SensorGeometry(
        major_radius=geometry.major_radius,
        minor_radius=geometry.minor_radius,
        thickness=geometry.thickness,
        density=geometry.density,
        substrate_gap=h_star,
        active_fraction=geometry.active_fraction,
    )
    residual = abs(squeeze_length(probe, mode) - l_drag) / l_drag
    if residual > 1e-9:
        raise ArithmeticError(f"crossover height self-check failed: residual {residual:.2e}")
    return h_star


@dataclass(frozen=True)
class DampingDecomposition:
    """Result of splitting a measured damping sweep into intrinsic and gas parts.

    Rates are angular (rad/s); pressures in Pa.
    """

    intrinsic_damping: float
    gas_damping: float
    reference_pressure: float
    plateau_pressure: float
    warnings: tuple = ()


def decompose_damping(sweep: Sequence, min_decades=3.0) -> DampingDecomposition:
    """Split a pressure sweep of total damping into intrinsic and gas parts.

    The lowest-pressure point is treated as the intrinsic plateau; the gas
    contribution is reported at the highest (reference) pressure.  Plateau
    ambiguity (a non-monotone sweep, or a sweep spanning fewer than
    ``min_decades`` decades) is flagged in ``warnings`` rather than raised.

    Args:
        sweep: (static_pressure_pa, total_damping_rad_s) pairs, any order.

    Raises:
        ValueError: fewer than two sweep points.
    """
    points = sorted((float(p), float(g)) for p, g in sweep)
    if len(points) < 2:
        raise ValueError("damping decomposition needs at least two sweep points")
    pressures = [p for p, _ in points]
    rates = [g for _, g in points]
    if min(pressures) <= 0.0:
        raise ValueError("pressures must be > 0")

    warnings = []
    decades = math.log10(pressures[-1] / pressures[0])
    if decades < min_decades:
        warnings.append(
            f"sweep spans only {decades:.2f} decades of pressure; plateau may be unresolved"
        )
    if any(rates[i + 1] < rates[i] for i in range(len(rates) - 1)):
        warnings.append("damping is not monotone in pressure; plateau detection ambiguous")

    intrinsic = min(rates)
    plateau_pressure = pressures[rates.index(intrinsic)]
    reference_pressure = pressures[-1]
    gas = rates[-1] - intrinsic
    return DampingDecomposition(
        intrinsic_damping=intrinsic,
        gas_damping=gas,
        reference_pressure=reference_pressure,
        plateau_pressure=plateau_pressure,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class DampingBudget:
    """Complete fluidic damping budget for one mode.

    Lengths are cyclic-convention (m); rates angular (rad/s).
    """

    l_drag: float
    l_squeeze: float
    gamma_drag: float
    gamma_squeeze: float
    gamma_gas_total: float
    gamma_intrinsic: float
    drag_coefficient: float

    def __post_init__(self):
        for name in (
            "l_drag",
            "l_squeeze",
            "gamma_drag",
            "gamma_squeeze",
            "gamma_gas_total",
            "gamma_intrinsic",
        ):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        total = self.gamma_drag + self.gamma_squeeze
        if total > 0.0 and abs(self.gamma_gas_total - total) > 1e-9 * total:
            raise ValueError("gamma_gas_total must equal gamma_drag + gamma_squeeze")

    @property
    def l_total(self):
        return self.l_drag + self.l_squeeze


def damping_budget(geometry, mode, gas, drag_coefficient=DEFAULT_DRAG_COEFFICIENT):
    """Model both fluidic damping channels for a mode above a flat substrate."""
    l_d = drag_length(geometry, mode, drag_coefficient)
    l_s = squeeze_length(geometry, mode)
    g_d = gas_damping_rate(l_d, gas, mode)
    g_s = gas_damping_rate(l_s, gas, mode)
    return DampingBudget(
        l_drag=l_d,
        l_squeeze=l_s,
        gamma_drag=g_d,
        gamma_squeeze=g_s,
        gamma_gas_total=g_d + g_s,
        gamma_intrinsic=mode.intrinsic_damping,
        drag_coefficient=drag_coefficient,
    )
