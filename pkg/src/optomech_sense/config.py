"""TOML configuration loading for devices, gas, cavity and modes.

The schema is flat key/value pairs inside nested sections.  All lengths
are metres and all rates rad/s; any rate-like key also accepts an alias
with an ``_hz`` suffix holding the cyclic value, which is multiplied by
2*pi on load.  Command-line overrides use dotted paths
(``cavity.photon_number=1e8``) and are applied to the raw tree before
validation.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional

try:
    import tomllib as _toml
except ModuleNotFoundError:  # Python < 3.11
    import tomli as _toml

from .core import TWO_PI, GasEnvironment, MechanicalMode, OpticalCavity, SensorGeometry
from .errors import ConfigError
from .response import Coupling

_MISSING = object()


def _section(raw, name, required=True):
    value = raw.get(name)
    if value is None:
        if required:
            raise ConfigError(f"missing required section [{name}]")
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"[{name}] must be a section, got {type(value).__name__}")
    return value


def _number(section, section_name, key, default=_MISSING):
    if key in section:
        value = section[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{section_name}.{key}: expected a number, got {value!r}")
        return float(value)
    if default is _MISSING:
        raise ConfigError(f"{section_name}.{key}: required key is missing")
    return default


def _rate(section, section_name, key, default=_MISSING):
    """Angular rate from ``key`` (rad/s) or ``key_hz`` (cyclic, scaled by 2 pi)."""
    alias = f"{key}_hz"
    if key in section and alias in section:
        raise ConfigError(f"{section_name}: give only one of '{key}' and '{alias}'")
    if alias in section:
        return TWO_PI * _number(section, section_name, alias)
    return _number(section, section_name, key, default)


@dataclass(frozen=True)
class ConfiguredMode:
    """A mechanical mode plus its transduction bookkeeping."""

    mode: MechanicalMode
    kind: Coupling
    gain: float = 1.0


@dataclass(frozen=True)
class ModelConfig:
    """Validated model configuration plus the raw tree for extra sections."""

    geometry: SensorGeometry
    gas: GasEnvironment
    cavity: OpticalCavity
    modes: Dict[str, ConfiguredMode]
    raw: dict
    source_path: Optional[Path] = None

    @property
    def sensing_area(self):
        """Reported sensing area: explicit [sensing] area, else geometry area."""
        sensing = self.raw.get("sensing", {})
        if "area" in sensing:
            return float(sensing["area"])
        area = self.geometry.area
        if sensing.get("use_active_fraction", False):
            area *= self.geometry.active_fraction
        return area

    def mode(self, name=None) -> ConfiguredMode:
        """Look up a mode by name; defaults to the first configured mode."""
        if not self.modes:
            raise ConfigError("no [modes.*] sections configured")
        if name is None:
            return next(iter(self.modes.values()))
        try:
            return self.modes[name]
        except KeyError:
            raise ConfigError(
                f"unknown mode '{name}'; configured: {sorted(self.modes)}"
            ) from None


def parse_override(text):
    """Parse a ``dotted.path=value`` override into (path tuple, value)."""
    if "=" not in text:
        raise ConfigError(f"override '{text}' must look like section.key=value")
    path, raw_value = text.split("=", 1)
    keys = tuple(part.strip() for part in path.strip().split("."))
    if not all(keys):
        raise ConfigError(f"override '{text}' has an empty path component")
    value = raw_value.strip()
    if value.lower() in ("true", "false"):
        parsed = value.lower() == "true"
    else:
        try:
            parsed = int(value)
        except ValueError:
            try:
                parsed = float(value)
            except ValueError:
                parsed = value.strip("\"'")
    return keys, parsed


def apply_overrides(raw, overrides):
    """Apply dotted-path overrides to a nested dict, creating sections as needed.

    An override that sets a rate under either its plain name or its
    ``_hz`` alias replaces the other spelling from the file, so
    ``cavity.intrinsic_loss=4e7`` wins over a configured
    ``intrinsic_loss_hz``.
    """
    for text in overrides:
        keys, value = parse_override(text)
        node = raw
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override '{text}' descends into a non-section value")
        leaf = keys[-1]
        sibling = leaf[: -len("_hz")] if leaf.endswith("_hz") else f"{leaf}_hz"
        node.pop(sibling, None)
        node[leaf] = value
    return raw


def _build_geometry(raw):
    section = _section(raw, "geometry")
    try:
        return SensorGeometry(
            major_radius=_number(section, "geometry", "major_radius"),
            minor_radius=_number(section, "geometry", "minor_radius", 0.0),
            thickness=_number(section, "geometry", "thickness"),
            density=_number(section, "geometry", "density"),
            substrate_gap=_number(section, "geometry", "substrate_gap"),
            active_fraction=_number(section, "geometry", "active_fraction", 1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"geometry: {exc}") from None


def _build_gas(raw):
    section = _section(raw, "gas", required=False)
    defaults = GasEnvironment.air()
    try:
        return GasEnvironment(
            viscosity=_number(section, "gas", "viscosity", defaults.viscosity),
            temperature=_number(section, "gas", "temperature", defaults.temperature),
            density=_number(section, "gas", "density", defaults.density),
            sound_speed=_number(section, "gas", "sound_speed", defaults.sound_speed),
            acoustic_impedance=_number(
                section, "gas", "acoustic_impedance", defaults.acoustic_impedance
            ),
            heat_capacity=_number(section, "gas", "heat_capacity", defaults.heat_capacity),
            expansion_coeff=_number(
                section, "gas", "expansion_coeff", defaults.expansion_coeff
            ),
            static_pressure=_number(
                section, "gas", "static_pressure", defaults.static_pressure
            ),
        )
    except ValueError as exc:
        raise ConfigError(f"gas: {exc}") from None


def _build_cavity(raw):
    section = _section(raw, "cavity")
    try:
        return OpticalCavity(
            intrinsic_loss=_rate(section, "cavity", "intrinsic_loss"),
            input_coupling=_rate(section, "cavity", "input_coupling"),
            detuning=_rate(section, "cavity", "detuning", 0.0),
            dispersive_coupling=_rate(section, "cavity", "dispersive_coupling", 0.0),
            dissipative_coupling=_number(section, "cavity", "dissipative_coupling", 0.0),
            vacuum_coupling=_rate(section, "cavity", "vacuum_coupling", 0.0),
            photon_number=_number(section, "cavity", "photon_number", 0.0),
            wavelength=_number(section, "cavity", "wavelength", 1.55e-6),
        )
    except ValueError as exc:
        raise ConfigError(f"cavity: {exc}") from None


def _build_modes(raw):
    section = _section(raw, "modes", required=False)
    modes = {}
    for name, table in section.items():
        if not isinstance(table, dict):
            raise ConfigError(f"modes.{name} must be a section")
        where = f"modes.{name}"
        kind_text = str(table.get("kind", "dispersive")).lower()
        try:
            kind = Coupling(kind_text)
        except ValueError:
            raise ConfigError(
                f"{where}.kind: expected 'dispersive' or 'dissipative', got '{kind_text}'"
            ) from None
        try:
            mode = MechanicalMode(
                resonance_freq=_rate(table, where, "resonance_freq"),
                intrinsic_damping=_rate(table, where, "intrinsic_damping"),
                gas_damping=_rate(table, where, "gas_damping", 0.0),
                effective_mass=_number(table, where, "effective_mass"),
                overlap=_number(table, where, "overlap", 1.0),
                participation_ratio=_number(table, where, "participation_ratio", 1.0),
            )
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from None
        modes[name] = ConfiguredMode(
            mode=mode, kind=kind, gain=_number(table, where, "gain", 1.0)
        )
    return modes


def load_config(path, overrides=()) -> ModelConfig:
    """Load, override and validate a model configuration file.

    Raises:
        ConfigError: missing file, TOML syntax error (with line info), or
            schema violation (with the offending section.key).
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as handle:
            raw = _toml.load(handle)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML parse error: {exc}") from None
    raw = apply_overrides(raw, overrides)
    return ModelConfig(
        geometry=_build_geometry(raw),
        gas=_build_gas(raw),
        cavity=_build_cavity(raw),
        modes=_build_modes(raw),
        raw=raw,
        source_path=path,
    )
