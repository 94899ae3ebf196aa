"""Minimal self-contained SVG line plots.

Plots are a best-effort convenience: every figure is regenerable from
the CSV it accompanies.  Writing SVG by hand keeps the output
byte-deterministic, which the reproducibility checks rely on.
"""
from __future__ import annotations

import math

import numpy as np

from .csvio import atomic_write_text

_WIDTH = 800
_HEIGHT = 480
_MARGIN = 60


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def line_plot_svg(path, x, y, xlabel, ylabel, title="", log_y=False):
    """Write a single-series line plot as an SVG file.

    Non-finite samples are dropped; with ``log_y`` non-positive values
    are dropped too and the axis shows log10 of the data.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(x) & np.isfinite(y)
    if log_y:
        keep &= y > 0.0
    x, y = x[keep], y[keep]
    if len(x) < 2:
        atomic_write_text(path, _empty_figure(title or "no data"))
        return
    if log_y:
        y = np.log10(y)
        ylabel = f"log10({ylabel})"

    x_lo, x_hi = float(np.min(x)), float(np.max(x))
    y_lo, y_hi = float(np.min(y)), float(np.max(y))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    inner_w = _WIDTH - 2 * _MARGIN
    inner_h = _HEIGHT - 2 * _MARGIN

    def sx(value):
        return _MARGIN + (value - x_lo) / (x_hi - x_lo) * inner_w

    def sy(value):
        return _HEIGHT - _MARGIN - (value - y_lo) / (y_hi - y_lo) * inner_h

    points = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<polyline points="{points}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>',
        f'<line x1="{_MARGIN}" y1="{_HEIGHT - _MARGIN}" x2="{_WIDTH - _MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
    ]
    for tick in _ticks(x_lo, x_hi):
        px = sx(tick)
        parts.append(
            f'<line x1="{px:.2f}" y1="{_HEIGHT - _MARGIN}" x2="{px:.2f}" '
            f'y2="{_HEIGHT - _MARGIN + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{_HEIGHT - _MARGIN + 20}" font-size="11" '
            f'text-anchor="middle">{tick:.4g}</text>'
        )
    for tick in _ticks(y_lo, y_hi):
        py = sy(tick)
        parts.append(
            f'<line x1="{_MARGIN - 5}" y1="{py:.2f}" x2="{_MARGIN}" '
            f'y2="{py:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_MARGIN - 8}" y="{py + 4:.2f}" font-size="11" '
            f'text-anchor="end">{tick:.4g}</text>'
        )
    parts.append(
        f'<text x="{_WIDTH / 2}" y="{_HEIGHT - 15}" font-size="13" '
        f'text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="18" y="{_HEIGHT / 2}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 18 {_HEIGHT / 2})">{ylabel}</text>'
    )
    if title:
        parts.append(
            f'<text x="{_WIDTH / 2}" y="30" font-size="15" '
            f'text-anchor="middle">{title}</text>'
        )
    parts.append("</svg>")
    atomic_write_text(path, "\n".join(parts) + "\n")


def _empty_figure(message):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}">'
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>'
        f'<text x="{_WIDTH / 2}" y="{_HEIGHT / 2}" font-size="14" '
        f'text-anchor="middle">{message}</text></svg>\n'
    )
