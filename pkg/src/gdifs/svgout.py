"""Tiny SVG emitter: interval bars for 1D clouds, scatters, function graphs.

Hand-rolled polyline/circle/rect primitives, no plotting dependency; output
is deterministic for identical inputs.
"""

from __future__ import annotations

import numpy as np

__all__ = ["cloud_1d", "cloud_2d", "curve"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_MAX_MARKS = 20000


def _fmt(v):
    return f"{v:.6g}"


def _write(path, width, height, parts):
    body = "\n".join(parts)
    with open(path, "w", encoding="ascii") as handle:
        handle.write(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n'
            f'<rect width="{width}" height="{height}" fill="white"/>\n'
            f"{body}\n</svg>\n")


def _thin(arr):
    if len(arr) > _MAX_MARKS:
        stride = -(-len(arr) // _MAX_MARKS)
        return arr[::stride]
    return arr


def cloud_1d(components, path):
    """One horizontal bar per vertex with a tick at every cloud point."""
    width, row, margin = 640, 70, 40
    height = margin * 2 + row * len(components)
    parts = []
    for k, comp in enumerate(components):
        y = margin + row * k + row // 2
        x0, x1 = margin, width - margin
        parts.append(f'<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#999" stroke-width="1"/>')
        parts.append(f'<text x="{6}" y="{y + 4}" font-size="13" font-family="sans-serif">'
                     f"v{k + 1}</text>")
        color = _COLORS[k % len(_COLORS)]
        for p in _thin(np.asarray(comp)):
            px = x0 + (x1 - x0) * float(p)
            parts.append(f'<line x1="{_fmt(px)}" y1="{y - 9}" x2="{_fmt(px)}" y2="{y + 9}" '
                         f'stroke="{color}" stroke-width="0.6"/>')
    _write(path, width, height, parts)


def cloud_2d(components, path):
    """Scatter of 2D cloud components on the unit square."""
    size, margin = 520, 40
    span = size - 2 * margin
    parts = [f'<rect x="{margin}" y="{margin}" width="{span}" height="{span}" '
             f'fill="none" stroke="#999"/>']
    for k, comp in enumerate(components):
        color = _COLORS[k % len(_COLORS)]
        for p in _thin(np.asarray(comp).reshape(-1, 2)):
            px = margin + span * float(p[0])
            py = margin + span * (1.0 - float(p[1]))
            parts.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="1.2" fill="{color}"/>')
    _write(path, size, size, parts)


def curve(xs, ys, path, label=""):
    """Function graph on the unit square as a polyline."""
    size, margin = 520, 40
    span = size - 2 * margin
    pts = " ".join(
        f"{_fmt(margin + span * float(x))},{_fmt(margin + span * (1.0 - float(y)))}"
        for x, y in zip(xs, ys))
    parts = [
        f'<rect x="{margin}" y="{margin}" width="{span}" height="{span}" fill="none" stroke="#999"/>',
        f'<polyline points="{pts}" fill="none" stroke="{_COLORS[0]}" stroke-width="1.4"/>',
    ]
    if label:
        parts.append(f'<text x="{margin}" y="{margin - 10}" font-size="14" '
                     f'font-family="sans-serif">{label}</text>')
    for t in (0.0, 0.5, 1.0):
        x = margin + span * t
        y = size - margin
        parts.append(f'<line x1="{_fmt(x)}" y1="{y}" x2="{_fmt(x)}" y2="{y + 5}" stroke="#333"/>')
        parts.append(f'<text x="{_fmt(x - 8)}" y="{y + 18}" font-size="11" '
                     f'font-family="sans-serif">{t:g}</text>')
    _write(path, size, size, parts)
