"""Exception types shared across the package.

The CLI maps these onto distinct process exit codes, so commands can be
scripted against reliably: configuration problems, malformed input data
and numerical divergence never share a code.
"""


class OptomechSenseError(Exception):
    """Base class for all package errors."""


class InvalidGeometryError(OptomechSenseError, ValueError):
    """Sensor geometry violates a physical constraint (non-positive dimension, ...)."""


class InvalidModeError(OptomechSenseError, ValueError):
    """Mechanical mode parameters are unphysical (m <= 0, m > M, negative rates)."""


class DegenerateModeError(OptomechSenseError, ValueError):
    """An operation hit a degenerate configuration (no moving area, singular response)."""


class ConfigError(OptomechSenseError):
    """Configuration file missing, unparsable, or failing schema validation."""


class DataFormatError(OptomechSenseError):
    """Instrument or tabular input data could not be parsed."""


class IntegrationDivergedError(OptomechSenseError, RuntimeError):
    """Time-domain integration left the stable regime.

    Attributes:
        suggested_dt: step size that satisfies the stability bound, or None.
    """

    def __init__(self, message, suggested_dt=None):
        super().__init__(message)
        self.suggested_dt = suggested_dt
