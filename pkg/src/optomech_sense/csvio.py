"""CSV ingestion and emission for instrument data and results.

Writers are atomic (temp file in the target directory, then rename) so
partially written outputs never appear under the final name.  Readers
raise :class:`~optomech_sense.errors.DataFormatError` with file and line
context on malformed input.
"""
from __future__ import annotations

import csv
import os
import tempfile
from pathlib import Path

import numpy as np

from .core import TWO_PI
from .errors import DataFormatError

MBAR_TO_PA = 100.0


def atomic_write_text(path, text):
    """Write text to ``path`` via a temporary file and atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def write_csv(path, header, columns):
    """Write named columns to CSV atomically.

    Args:
        header: column names.
        columns: equal-length sequences, one per header entry.
    """
    columns = [np.asarray(col) for col in columns]
    if len(header) != len(columns):
        raise ValueError("header and columns must have equal length")
    lengths = {len(col) for col in columns}
    if len(lengths) != 1:
        raise ValueError("all columns must have the same length")
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_format_cell(cell) for cell in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _format_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def read_columns(path, required):
    """Read named float columns from a CSV file.

    Args:
        required: column names that must be present in the header.

    Returns:
        dict mapping each required name to a float ndarray.
    """
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"{path}: file not found")
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        header = [name.strip() for name in header]
        missing = [name for name in required if name not in header]
        if missing:
            raise DataFormatError(f"{path}: missing columns {missing}, found {header}")
        index = {name: header.index(name) for name in required}
        data = {name: [] for name in required}
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            for name, col in index.items():
                try:
                    data[name].append(float(row[col]))
                except (ValueError, IndexError) as exc:
                    raise DataFormatError(
                        f"{path}:{line_no}: cannot parse column '{name}': {exc}"
                    ) from None
    if not data[required[0]]:
        raise DataFormatError(f"{path}: no data rows")
    return {name: np.asarray(values) for name, values in data.items()}


def read_network_analyzer_csv(path):
    """Load a network-analyser export with columns ``freq_hz, s21_db``.

    Returns:
        (frequencies_hz, s21_power_linear)
    """
    data = read_columns(path, ["freq_hz", "s21_db"])
    return data["freq_hz"], 10.0 ** (data["s21_db"] / 10.0)


def read_spectrum_analyzer_csv(path):
    """Load a spectrum-analyser export with columns ``freq_hz, psd_dbm_hz``.

    Returns:
        (frequencies_hz, psd_mw_per_hz) with the density in linear mW/Hz.
    """
    data = read_columns(path, ["freq_hz", "psd_dbm_hz"])
    return data["freq_hz"], 10.0 ** (data["psd_dbm_hz"] / 10.0)


def read_pressure_sweep_csv(path):
    """Load a damping sweep with columns ``pressure_mbar, gamma_total_hz``.

    Returns:
        list of (pressure_pa, gamma_total_rad_s) pairs.
    """
    data = read_columns(path, ["pressure_mbar", "gamma_total_hz"])
    pressures = data["pressure_mbar"] * MBAR_TO_PA
    rates = data["gamma_total_hz"] * TWO_PI
    return list(zip(pressures.tolist(), rates.tolist()))


def read_modeshape_csv(path):
    """Load a modeshape grid with columns ``x_m, y_m, u, cell_area_m2``."""
    from .applications import ModeshapeGrid

    data = read_columns(path, ["x_m", "y_m", "u", "cell_area_m2"])
    try:
        return ModeshapeGrid(
            x=data["x_m"],
            y=data["y_m"],
            displacement=data["u"],
            cell_area=data["cell_area_m2"],
        )
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from None
