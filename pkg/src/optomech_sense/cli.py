"""Command-line front end.

Loads a device/gas/cavity configuration, runs sweeps and pipelines, and
writes CSV (the data contract) plus optional SVG plots.  Every command
records a run manifest in its output directory; ``rerun`` replays a
manifest into a fresh directory and reproduces the outputs.

Exit codes: 0 success, 2 configuration error, 3 input-data error,
4 numerical divergence.  The ``OPTOMECH_SENSE_THREADS`` environment
variable caps the worker pool used for grid sweeps.
"""
from __future__ import annotations

import functools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import click
import numpy as np

from . import __version__
from .applications import (
    GasLine,
    LaserPulse,
    absorption_from_concentration,
    cell_vibration_pressure,
    cooled_linewidth,
    cooling_flattened_peak,
    detectable_displacement,
    min_concentration,
    rayleigh_analysis,
)
from .calibration import (
    PropagationPath,
    S21Sweep,
    atmospheric_attenuation,
    diffraction_factor,
    pressure_at_sensor,
    pzt_displacement,
    pzt_pressure,
    responsivity,
)
from .config import ModelConfig, load_config
from .core import TWO_PI, BOLTZMANN, MechanicalMode, SpectrumSeries
from .csvio import atomic_write_text, read_columns, read_network_analyzer_csv, write_csv
from .errors import (
    ConfigError,
    DataFormatError,
    IntegrationDivergedError,
    OptomechSenseError,
)
from .noise import (
    OneOverFNoise,
    force_sensitivity as app_force_sensitivity,
    ldr as ldr_value,
    nep,
    sensitivity_report,
    synthesize_noise_spectrum,
)
from .response import Coupling, om_susceptibility, optimal_detuning
from .svgplot import line_plot_svg
from .timedomain import (
    DriveSettings,
    SimulationConfig,
    displacement_psd_model,
    psd_estimate,
    simulate_langevin,
    transduce,
)

EXIT_CONFIG_ERROR = 2
EXIT_DATA_ERROR = 3
EXIT_DIVERGED = 4
THREADS_ENV = "OPTOMECH_SENSE_THREADS"
MANIFEST_NAME = "run_manifest.json"
_MAX_TRACE_ROWS = 200_000


def bundled_config_path() -> Path:
    """Path of the packaged reference-device configuration."""
    return Path(__file__).parent / "data" / "paper.toml"


def worker_count() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        if value < 1:
            raise ConfigError(f"{THREADS_ENV} must be >= 1, got {value}")
        return value
    return min(8, os.cpu_count() or 1)


def _parallel_eval(func, grid):
    """Evaluate func on chunks of a grid across the worker pool, in order."""
    workers = worker_count()
    chunks = [c for c in np.array_split(grid, workers) if len(c)]
    if len(chunks) <= 1:
        return func(grid)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(func, chunks))
    return np.concatenate(parts)


@dataclass
class CliState:
    config_path: Optional[str]
    out_dir: Path
    seed: Optional[int]
    overrides: Tuple[str, ...]
    fmt: str

    def load(self) -> ModelConfig:
        if self.config_path is None:
            raise ConfigError("no configuration given; pass --config PATH")
        return load_config(self.config_path, self.overrides)

    @property
    def want_svg(self) -> bool:
        return self.fmt == "csv+svg"


def _guarded(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG_ERROR)
        except DataFormatError as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(EXIT_DATA_ERROR)
        except IntegrationDivergedError as exc:
            message = f"numerical divergence: {exc}"
            if exc.suggested_dt is not None:
                message += f" (suggested dt <= {exc.suggested_dt:.4e} s)"
            click.echo(message, err=True)
            sys.exit(EXIT_DIVERGED)
    return wrapper


def _write_manifest(state: CliState, command: str, parameters: dict):
    state.out_dir.mkdir(parents=True, exist_ok=True)
    config_path = (
        str(Path(state.config_path).resolve()) if state.config_path else None
    )
    manifest = {
        "command": command,
        "config_path": config_path,
        "out_dir": str(state.out_dir.resolve()),
        "overrides": list(state.overrides),
        "format": state.fmt,
        "seed": state.seed,
        "tool_version": __version__,
        "parameters": parameters,
    }
    atomic_write_text(
        state.out_dir / MANIFEST_NAME, json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )


def _write_report(path, title, rows):
    """Write ``key = value  # comment`` lines as a structured text report."""
    lines = [f"# {title}"]
    for key, value, comment in rows:
        if isinstance(value, float):
            text = format(value, ".9g")
        else:
            text = str(value)
        line = f"{key} = {text}"
        if comment:
            line += f"  # {comment}"
        lines.append(line)
    atomic_write_text(path, "\n".join(lines) + "\n")


def _section(config: ModelConfig, *names, required=True):
    node = config.raw
    for name in names:
        node = node.get(name) if isinstance(node, dict) else None
        if node is None:
            if required:
                raise ConfigError(f"missing config section [{'.'.join(names)}]")
            return {}
    return node


def _key(section, path, key, default=None):
    if key in section:
        return section[key]
    if default is None:
        raise ConfigError(f"missing config key {path}.{key}")
    return default


@click.group()
@click.version_option(__version__, prog_name="optomech-sense")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Model configuration file (TOML).")
@click.option("--out", "out_dir", type=click.Path(), default="optomech-out",
              show_default=True, help="Output directory.")
@click.option("--seed", type=int, default=None, help="Random seed override.")
@click.option("--override", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Dotted-path config override, repeatable.")
@click.option("--format", "fmt", type=click.Choice(["csv", "csv+svg"]),
              default="csv", show_default=True, help="Output formats.")
@click.pass_context
def main(ctx, config_path, out_dir, seed, overrides, fmt):
    """Cavity optomechanical acoustic sensor modeling toolkit."""
    ctx.obj = CliState(
        config_path=config_path,
        out_dir=Path(out_dir),
        seed=seed,
        overrides=tuple(overrides),
        fmt=fmt,
    )


@main.command("detuning-sweep")
@click.option("--kind", type=click.Choice(["dispersive", "dissipative"]),
              default="dispersive", show_default=True)
@click.option("--mode", "mode_name", default=None, help="Configured mode name.")
@click.option("--drive-freq-hz", type=float, default=None,
              help="Acoustic drive frequency [Hz]; defaults to the mode resonance.")
@click.option("--span", type=float, default=3.0, show_default=True,
              help="Half-width of the detuning grid in units of kappa_0.")
@click.option("--points", type=int, default=601, show_default=True)
@click.pass_obj
@_guarded
def detuning_sweep(state: CliState, kind, mode_name, drive_freq_hz, span, points):
    """Response magnitude versus laser-cavity detuning at a fixed drive tone."""
    config = state.load()
    configured = config.mode(mode_name)
    coupling = Coupling(kind)
    cavity = config.cavity
    omega = (
        TWO_PI * drive_freq_hz if drive_freq_hz is not None
        else configured.mode.resonance_freq
    )
    kappa_0 = cavity.total_loss
    grid = np.linspace(-span * kappa_0, span * kappa_0, points)

    def evaluate(chunk):
        return om_susceptibility(cavity, configured.mode, coupling, omega, chunk)

    chi = _parallel_eval(evaluate, grid)
    best = optimal_detuning(cavity, coupling)

    _write_manifest(state, "detuning-sweep", {
        "kind": kind, "mode_name": mode_name, "drive_freq_hz": drive_freq_hz,
        "span": span, "points": points,
    })
    write_csv(
        state.out_dir / "detuning_response.csv",
        ["detuning_rad_s", "magnitude", "phase_rad"],
        [grid, np.abs(chi), np.angle(chi)],
    )
    _write_report(state.out_dir / "report.txt", "detuning sweep", [
        ("kind", kind, None),
        ("drive_freq_hz", omega / TWO_PI, "acoustic drive"),
        ("kappa_0_rad_s", kappa_0, "loaded cavity linewidth"),
        ("optimal_detuning_rad_s", best, "quasi-static maximum response"),
    ])
    if state.want_svg:
        line_plot_svg(
            state.out_dir / "detuning_response.svg", grid, np.abs(chi),
            xlabel="detuning [rad/s]", ylabel="|response| [1/N]",
            title=f"{kind} response vs detuning",
        )
    click.echo(f"detuning sweep written to {state.out_dir}")


@main.command("noise-budget")
@click.option("--mode", "mode_name", default=None, help="Mode to report on.")
@click.option("--fmin-hz", type=float, default=1e3, show_default=True)
@click.option("--fmax-hz", type=float, default=1e6, show_default=True)
@click.option("--points", type=int, default=4000, show_default=True)
@click.pass_obj
@_guarded
def noise_budget(state: CliState, mode_name, fmin_hz, fmax_hz, points):
    """Synthesised noise spectrum, NEP curve and sensitivity report."""
    config = state.load()
    if not config.modes:
        raise ConfigError("noise budget needs at least one [modes.*] section")
    selected_name = mode_name or next(iter(config.modes))
    config.mode(selected_name)  # validates the name
    mode_items = list(config.modes.items())
    mode_index = [name for name, _ in mode_items].index(selected_name)
    selected = mode_items[mode_index][1]

    noise_cfg = _section(config, "noise", required=False)
    shot_floor = float(noise_cfg.get("shot_floor", 0.0))
    oneoverf = None
    if float(noise_cfg.get("oneoverf_amplitude", 0.0)) > 0.0:
        oneoverf = OneOverFNoise(
            amplitude_at_1hz=float(noise_cfg["oneoverf_amplitude"]),
            exponent=float(noise_cfg.get("oneoverf_exponent", 1.0)),
        )

    freqs = np.geomspace(fmin_hz, fmax_hz, points)
    triples = [(cm.mode, cm.kind, cm.gain) for _, cm in mode_items]
    spectrum = synthesize_noise_spectrum(
        triples, shot_floor, freqs, temperature=config.gas.temperature,
        oneoverf=oneoverf,
    )

    area = config.sensing_area
    efficiency = float(_section(config, "sensing", required=False).get(
        "detection_efficiency", 1.0))

    def nep_chunk(chunk):
        return nep(
            selected.mode, config.gas, config.cavity, area, selected.kind,
            TWO_PI * chunk, config.cavity.detuning, efficiency=efficiency,
        )

    nep_curve = _parallel_eval(nep_chunk, freqs)
    sensing = _section(config, "sensing", required=False)
    report_freq = float(sensing.get(
        "drive_freq_hz", selected.mode.resonance_freq / TWO_PI))
    nep_at_report = float(nep(
        selected.mode, config.gas, config.cavity, area, selected.kind,
        TWO_PI * report_freq, config.cavity.detuning, efficiency=efficiency,
    ))
    report = (
        sensitivity_report(spectrum, nep_at_report, mode_index)
        if shot_floor > 0.0 else None
    )

    _write_manifest(state, "noise-budget", {
        "mode_name": mode_name, "fmin_hz": fmin_hz, "fmax_hz": fmax_hz,
        "points": points,
    })
    component_names = sorted(spectrum.components)
    write_csv(
        state.out_dir / "noise_spectrum.csv",
        ["freq_hz"] + component_names + ["total"],
        [freqs] + [spectrum.components[name] for name in component_names]
        + [spectrum.total.values],
    )
    write_csv(state.out_dir / "nep.csv", ["freq_hz", "nep_pa_sqrthz"],
              [freqs, nep_curve])
    rows = [
        ("mode", selected_name, None),
        ("report_freq_hz", report_freq, None),
        ("nep_pa_sqrthz", nep_at_report, "noise-equivalent pressure"),
        ("sensing_area_m2", area, None),
        ("temperature_k", config.gas.temperature, None),
    ]
    if report is not None:
        rows.append(("dominant_term", report.dominant_term.value, "at resonance"))
        if report.band is not None:
            rows.append(("band_lo_hz", report.band[0], "thermomechanical > shot"))
            rows.append(("band_hi_hz", report.band[1], None))
        else:
            rows.append(("band", "none", "peak never crosses the shot floor"))
    _write_report(state.out_dir / "sensitivity_report.txt", "noise budget", rows)
    if state.want_svg:
        line_plot_svg(state.out_dir / "noise_spectrum.svg", freqs,
                      spectrum.total.values, xlabel="frequency [Hz]",
                      ylabel="PSD", title="synthesised noise spectrum", log_y=True)
        line_plot_svg(state.out_dir / "nep.svg", freqs, nep_curve,
                      xlabel="frequency [Hz]", ylabel="NEP [Pa/sqrt(Hz)]",
                      title="noise-equivalent pressure", log_y=True)
    click.echo(f"noise budget written to {state.out_dir}")


@main.command("calibrate")
@click.option("--s21-csv", "s21_path", required=True, type=click.Path(),
              help="Network-analyser export: freq_hz, s21_db.")
@click.option("--measured-csv", "measured_path", default=None, type=click.Path(),
              help="Measured sensor spectrum: freq_hz, volts.")
@click.pass_obj
@_guarded
def calibrate(state: CliState, s21_path, measured_path):
    """Applied-pressure calibration chain from an interferometer S21 sweep."""
    config = state.load()
    cal = _section(config, "calibration")
    path_cfg = _section(config, "calibration", "path")
    wavelength = float(_key(cal, "calibration", "wavelength",
                            config.cavity.wavelength))
    reference_freq = float(_key(cal, "calibration", "reference_freq_hz"))
    reference_voltage = float(_key(cal, "calibration", "reference_voltage"))
    max_voltage = float(_key(cal, "calibration", "max_voltage"))
    drive_voltage = float(cal.get("drive_voltage", 1.0))

    freqs, s21_linear = read_network_analyzer_csv(s21_path)
    try:
        sweep = S21Sweep(
            frequencies=freqs, s21_power=s21_linear,
            reference_freq=reference_freq, reference_voltage=reference_voltage,
            max_voltage=max_voltage, drive_voltage=drive_voltage,
        )
        displacement = pzt_displacement(sweep, wavelength)
    except ValueError as exc:
        raise DataFormatError(f"{s21_path}: {exc}") from None

    path = PropagationPath(
        distance=float(_key(path_cfg, "calibration.path", "distance")),
        aperture_side=float(_key(path_cfg, "calibration.path", "aperture_side")),
        temperature=float(path_cfg.get("temperature", 293.15)),
        relative_humidity=float(path_cfg.get("relative_humidity", 50.0)),
        pressure=float(path_cfg.get("pressure", 101325.0)),
    )
    d = displacement.displacement.values
    p_pzt = pzt_pressure(d, freqs, config.gas)
    diffraction = diffraction_factor(path, freqs, config.gas)
    attenuation = atmospheric_attenuation(path, freqs)
    p_sensor = pressure_at_sensor(p_pzt, diffraction, attenuation)

    _write_manifest(state, "calibrate", {
        "s21_path": str(Path(s21_path).resolve()),
        "measured_path": str(Path(measured_path).resolve()) if measured_path else None,
    })
    write_csv(
        state.out_dir / "applied_pressure.csv",
        ["freq_hz", "displacement_m", "saturated", "pressure_pzt_pa",
         "diffraction_factor", "attenuation", "pressure_sensor_pa"],
        [freqs, d, displacement.saturated, p_pzt, diffraction, attenuation, p_sensor],
    )
    if np.any(displacement.saturated):
        click.echo(
            f"warning: {int(np.sum(displacement.saturated))} points at fringe "
            "saturation (displacement >= lambda/4)", err=True)
    if measured_path is not None:
        measured = read_columns(measured_path, ["freq_hz", "volts"])
        response = responsivity(
            SpectrumSeries(measured["freq_hz"], measured["volts"], unit="V"),
            SpectrumSeries(freqs, p_sensor, unit="Pa"),
        )
        write_csv(state.out_dir / "responsivity.csv",
                  ["freq_hz", "responsivity_v_pa"],
                  [response.frequencies, response.values])
    if state.want_svg:
        line_plot_svg(state.out_dir / "applied_pressure.svg", freqs, p_sensor,
                      xlabel="frequency [Hz]", ylabel="pressure [Pa]",
                      title="pressure at the sensor", log_y=True)
    click.echo(f"calibration chain written to {state.out_dir}")


@main.command("applications")
@click.argument("task", type=click.Choice(
    ["trace-gas", "cell-vib", "cooling", "ldr", "force-sens"]))
@click.pass_obj
@_guarded
def applications_cmd(state: CliState, task):
    """Application-level estimates; inputs are echoed into the report."""
    config = state.load()
    rows = []
    if task == "trace-gas":
        pulse_cfg = _section(config, "applications", "pulse")
        line_cfg = _section(config, "applications", "gas_line")
        tg = _section(config, "applications", "trace_gas")
        pulse = LaserPulse(
            energy=float(_key(pulse_cfg, "applications.pulse", "energy")),
            duration=float(_key(pulse_cfg, "applications.pulse", "duration")),
            beam_radius=float(_key(pulse_cfg, "applications.pulse", "beam_radius")),
        )
        line = GasLine(
            line_intensity=float(_key(line_cfg, "applications.gas_line", "line_intensity")),
            linewidth=float(_key(line_cfg, "applications.gas_line", "linewidth")),
            wavelength=float(_key(line_cfg, "applications.gas_line", "wavelength")),
        )
        distance = float(_key(tg, "applications.trace_gas", "distance"))
        p_eff_min = float(_key(tg, "applications.trace_gas", "min_effective_pressure"))
        freq = float(_key(tg, "applications.trace_gas", "frequency_hz"))
        limit = min_concentration(
            config.gas, line, pulse, p_eff_min, distance, TWO_PI * freq)
        alpha_min = absorption_from_concentration(limit.number_density, line)
        rows = [
            ("pulse_energy_j", pulse.energy, "input"),
            ("pulse_duration_s", pulse.duration, "input"),
            ("beam_radius_m", pulse.beam_radius, "input"),
            ("line_intensity_cm", line.line_intensity, "input, cm^-1/(molec cm^-2)"),
            ("linewidth_cm", line.linewidth, "input, cm^-1"),
            ("distance_m", distance, "input"),
            ("min_effective_pressure_pa", p_eff_min, "input"),
            ("frequency_hz", freq, "input"),
            ("temperature_k", config.gas.temperature, "input"),
            ("static_pressure_pa", config.gas.static_pressure, "input"),
            ("beam_fits_source", pulse.beam_fits_source(config.gas), "R_s < v tau"),
            ("min_density_per_m3", limit.number_density, "result"),
            ("min_density_per_cm3", limit.number_density_cm3, "result"),
            ("min_concentration_ppb", limit.ppb, "result"),
            ("min_absorption_per_m", alpha_min, "result"),
        ]
    elif task == "cell-vib":
        cv = _section(config, "applications", "cell_vibration")
        freq = float(_key(cv, "applications.cell_vibration", "frequency_hz"))
        displacement = float(_key(cv, "applications.cell_vibration", "displacement"))
        pressure = cell_vibration_pressure(freq, displacement, config.gas)
        rows = [
            ("frequency_hz", freq, "input"),
            ("displacement_m", displacement, "input"),
            ("acoustic_impedance", config.gas.acoustic_impedance, "input, Pa s/m"),
            ("pressure_pa", pressure, "result"),
        ]
        if "nep" in cv:
            bandwidth = float(cv.get("bandwidth_hz", 1.0))
            d_min = detectable_displacement(
                float(cv["nep"]), freq, config.gas, bandwidth)
            rows += [
                ("nep_pa_sqrthz", float(cv["nep"]), "input"),
                ("bandwidth_hz", bandwidth, "input"),
                ("detectable_displacement_m", d_min, "result"),
            ]
    elif task == "cooling":
        cool = _section(config, "applications", "cooling")
        gamma = TWO_PI * float(_key(cool, "applications.cooling", "damping_hz"))
        g0 = TWO_PI * float(_key(cool, "applications.cooling", "vacuum_coupling_hz"))
        photons = float(_key(cool, "applications.cooling", "photon_number"))
        kappa = config.cavity.total_loss
        coop = 4.0 * g0**2 * photons / (kappa * gamma)
        gamma_eff = cooled_linewidth(gamma, coop)
        rows = [
            ("damping_hz", gamma / TWO_PI, "input, bare linewidth"),
            ("vacuum_coupling_hz", g0 / TWO_PI, "input"),
            ("photon_number", photons, "input"),
            ("kappa_0_rad_s", kappa, "input, loaded cavity linewidth"),
            ("cooperativity", coop, "result"),
            ("cooled_linewidth_hz", gamma_eff / TWO_PI, "result"),
            ("peak_flattening_factor", cooling_flattened_peak(1.0, coop), "result"),
        ]
    elif task == "ldr":
        section = _section(config, "applications", "ldr")
        nep_in = float(_key(section, "applications.ldr", "nep"))
        p_max = float(_key(section, "applications.ldr", "max_pressure"))
        tau = float(section.get("integration_time", 1.0))
        rows = [
            ("nep_pa_sqrthz", nep_in, "input"),
            ("max_pressure_pa", p_max, "input"),
            ("integration_time_s", tau, "input"),
            ("ldr_db", ldr_value(nep_in, p_max, tau), "result"),
        ]
    else:  # force-sens
        section = _section(config, "applications", "force_sensitivity")
        nep_in = float(_key(section, "applications.force_sensitivity", "nep"))
        area = float(_key(section, "applications.force_sensitivity", "area"))
        rows = [
            ("nep_pa_sqrthz", nep_in, "input"),
            ("area_m2", area, "input"),
            ("force_sensitivity_n_sqrthz", app_force_sensitivity(nep_in, area), "result"),
        ]
        if "rayleigh_length" in section and "acoustic_wavelength" in section:
            z_r = float(section["rayleigh_length"])
            lam = float(section["acoustic_wavelength"])
            rows += [
                ("rayleigh_length_m", z_r, "input"),
                ("acoustic_wavelength_m", lam, "input"),
                ("beam_radius_m", rayleigh_analysis(lam, rayleigh_length=z_r), "result"),
            ]

    _write_manifest(state, "applications", {"task": task})
    _write_report(state.out_dir / f"{task}.txt", f"applications: {task}", rows)
    for key, value, _ in rows:
        click.echo(f"{key} = {value}")


@main.command("simulate")
@click.option("--mode", "mode_name", default=None, help="Configured mode name.")
@click.option("--segments", type=int, default=64, show_default=True,
              help="Welch segments for the PSD estimate.")
@click.pass_obj
@_guarded
def simulate(state: CliState, mode_name, segments):
    """Seeded Langevin run: trace, PSD and overlay against the analytic model."""
    config = state.load()
    configured = config.mode(mode_name)
    sim = _section(config, "simulation")
    drive_cfg = sim.get("drive", {})
    seed = state.seed if state.seed is not None else int(sim.get("seed", 0))
    try:
        sim_config = SimulationConfig(
            dt=float(_key(sim, "simulation", "dt")),
            duration=float(_key(sim, "simulation", "duration")),
            seed=seed,
            thermal=bool(sim.get("thermal", True)),
            drive=DriveSettings(
                amplitude=float(drive_cfg.get("amplitude_pa", 0.0)),
                frequency=TWO_PI * float(drive_cfg.get("frequency_hz", 0.0)),
                phase=float(drive_cfg.get("phase", 0.0)),
            ),
            initial_displacement=float(sim.get("initial_displacement", 0.0)),
            initial_velocity=float(sim.get("initial_velocity", 0.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"simulation: {exc}") from None

    mode = configured.mode
    trace = simulate_langevin(mode, config.gas, config.geometry, sim_config)
    trace = transduce(trace, config.cavity, configured.kind, mode=mode)
    spectrum = psd_estimate(trace, segments=segments)
    model = displacement_psd_model(mode, config.gas.temperature,
                                   spectrum.frequencies)

    variance = float(np.var(trace.displacement))
    equipartition = variance * mode.spring_constant / (
        BOLTZMANN * config.gas.temperature)

    # RMS log deviation against the analytic density over the resonance band.
    f_m = mode.resonance_freq / TWO_PI
    gamma_cyc = mode.total_damping / TWO_PI
    band = (spectrum.frequencies >= f_m - 5 * gamma_cyc) & (
        spectrum.frequencies <= f_m + 5 * gamma_cyc)
    rms_db = float("nan")
    if sim_config.thermal and np.count_nonzero(band) > 2:
        ratio_db = 10.0 * np.log10(spectrum.values[band] / model[band])
        rms_db = float(np.sqrt(np.mean(ratio_db**2)))

    _write_manifest(state, "simulate", {
        "mode_name": mode_name, "segments": segments,
    })
    stride = max(1, math.ceil(len(trace.times) / _MAX_TRACE_ROWS))
    write_csv(
        state.out_dir / "trace.csv",
        ["t_s", "x_m", "detector"],
        [trace.times[::stride], trace.displacement[::stride],
         trace.detector_signal[::stride]],
    )
    write_csv(
        state.out_dir / "psd.csv",
        ["freq_hz", "psd_m2_hz", "model_m2_hz"],
        [spectrum.frequencies, spectrum.values, model],
    )
    _write_report(state.out_dir / "summary.txt", "langevin simulation", [
        ("mode", mode_name or next(iter(config.modes)), None),
        ("seed", seed, None),
        ("dt_s", sim_config.dt, None),
        ("duration_s", sim_config.duration, None),
        ("trace_stride", stride, "thinning factor applied to trace.csv"),
        ("displacement_variance_m2", variance, None),
        ("equipartition_ratio", equipartition, "var * k / (k_B T); 1 is ideal"),
        ("psd_rms_log_deviation_db", rms_db, "vs analytic model over the resonance"),
    ])
    if state.want_svg:
        line_plot_svg(state.out_dir / "psd.svg", spectrum.frequencies,
                      spectrum.values, xlabel="frequency [Hz]",
                      ylabel="PSD [m^2/Hz]", title="displacement PSD", log_y=True)
    click.echo(f"equipartition_ratio = {equipartition:.4f}")
    click.echo(f"psd_rms_log_deviation_db = {rms_db:.4f}")
    click.echo(f"simulation written to {state.out_dir}")


_RERUNNABLE = {
    "detuning-sweep": detuning_sweep,
    "noise-budget": noise_budget,
    "calibrate": calibrate,
    "applications": applications_cmd,
    "simulate": simulate,
}


@main.command("rerun")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.pass_context
@_guarded
def rerun(ctx, manifest_path):
    """Replay a recorded run manifest into the current --out directory."""
    path = Path(manifest_path)
    if not path.exists():
        raise ConfigError(f"manifest not found: {path}")
    try:
        manifest = json.loads(path.read_text())
        command = manifest["command"]
        parameters = manifest["parameters"]
    except (json.JSONDecodeError, KeyError) as exc:
        raise DataFormatError(f"{path}: invalid manifest: {exc}") from None
    if command not in _RERUNNABLE:
        raise DataFormatError(f"{path}: unknown command '{command}'")
    state: CliState = ctx.obj
    ctx.obj = CliState(
        config_path=manifest.get("config_path"),
        out_dir=state.out_dir,
        seed=manifest.get("seed"),
        overrides=tuple(manifest.get("overrides", ())),
        fmt=manifest.get("format", "csv"),
    )
    # Parameter names on the command line map 1:1 onto callback arguments.
    ctx.invoke(_RERUNNABLE[command], **parameters)


if __name__ == "__main__":
    main()
