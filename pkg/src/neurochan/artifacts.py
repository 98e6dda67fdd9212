"""Deterministic CSV/JSON/SVG writers.

Files are written to a temporary sibling and renamed into place, so readers
never see a partial artifact.  Floats are rendered with repr (shortest
round-trip), which makes byte-identical replays possible.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile

import numpy as np


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: list[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    atomic_write_text(path, buf.getvalue())


def write_json(path: str, obj) -> None:
    atomic_write_text(path, json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n")


# --- minimal SVG output ------------------------------------------------------

_CANVAS = (640, 480)
_MARGIN = 40
_PALETTE = (
    "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377",
    "#bbbbbb", "#222255", "#88ccaa", "#aa8833", "#dd99bb", "#225588",
)


def _scaler(lo: float, hi: float, out_lo: float, out_hi: float):
    span = hi - lo if hi > lo else 1.0
    return lambda v: out_lo + (v - lo) / span * (out_hi - out_lo)


def write_svg_polylines(path: str, series, title: str = "") -> None:
    """Plot (xs, ys) pairs as polylines in a fixed-size framed canvas."""
    width, height = _CANVAS
    xs_all = np.concatenate([np.asarray(xs, dtype=float) for xs, _ in series])
    ys_all = np.concatenate([np.asarray(ys, dtype=float) for _, ys in series])
    sx = _scaler(xs_all.min(), xs_all.max(), _MARGIN, width - _MARGIN)
    sy = _scaler(ys_all.min(), ys_all.max(), height - _MARGIN, _MARGIN)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{width - 2 * _MARGIN}" '
        f'height="{height - 2 * _MARGIN}" fill="none" stroke="#333"/>',
    ]
    if title:
        parts.append(f'<text x="{width // 2}" y="24" text-anchor="middle">{title}</text>')
    for i, (xs, ys) in enumerate(series):
        pts = " ".join(
            f"{sx(float(x)):.2f},{sy(float(y)):.2f}" for x, y in zip(xs, ys)
        )
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>')
    parts.append("</svg>")
    atomic_write_text(path, "\n".join(parts) + "\n")


def write_svg_cellmap(path: str, cellmap, title: str = "") -> None:
    """Raster the label grid of a cell map as colored squares."""
    width, height = _CANVAS
    side = min(width, height) - 2 * _MARGIN
    nx, ny = cellmap.xs.size, cellmap.ys.size
    cw, ch = side / nx, side / ny
    distinct = {int(lbl): i for i, lbl in enumerate(cellmap.distinct_labels())}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
    ]
    if title:
        parts.append(f'<text x="{width // 2}" y="24" text-anchor="middle">{title}</text>')
    for iy in range(ny):
        for ix in range(nx):
            color = _PALETTE[distinct[int(cellmap.labels[iy, ix])] % len(_PALETTE)]
            x = _MARGIN + ix * cw
            y = _MARGIN + (ny - 1 - iy) * ch
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw:.2f}" height="{ch:.2f}" '
                f'fill="{color}"/>'
            )
    parts.append("</svg>")
    atomic_write_text(path, "\n".join(parts) + "\n")
