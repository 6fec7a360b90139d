"""CSV grids, trajectory tables and PPM heatmaps.

Floats are written with ``repr`` so a read-back reproduces every bit.
Heatmaps are binary P6 pixmaps with time running left to right and x
increasing upwards (top row is x_max).
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import IoError, PaletteMismatch
from .model import GridSpec

# anchors (position in [0, 1], rgb)
INTENSITY = ((0.0, (255, 255, 255)), (1 / 3, (255, 255, 0)), (2 / 3, (255, 165, 0)), (1.0, (255, 0, 0)))
DIVERGING = ((0.0, (0, 0, 255)), (0.5, (255, 255, 255)), (1.0, (255, 0, 0)))
PALETTES = {"intensity": INTENSITY, "diverging": DIVERGING}

#: Negative values smaller than this fraction of max|field| count as round-off.
NEGATIVE_TOL = 1e-12


def write_bytes(path, data: bytes) -> Path:
    path = Path(path)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from None
    return path


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _fmt_row(values) -> str:
    return ",".join(map(repr, np.asarray(values, dtype=float).tolist()))


def write_grid(field: np.ndarray, grid: GridSpec, path) -> Path:
    """CSV with header ``t\\x,x_0,...`` and one row per grid time."""
    field = np.asarray(field, dtype=float)
    if field.shape != (grid.nt + 1, grid.nx):
        raise ValueError(f"field shape {field.shape} does not match grid ({grid.nt + 1}, {grid.nx})")
    lines = ["t\\x," + _fmt_row(grid.x)]
    for t, row in zip(grid.t, field):
        lines.append(repr(float(t)) + "," + _fmt_row(row))
    return write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))


def read_grid(path):
    """Inverse of :func:`write_grid`: returns (t, x, field)."""
    try:
        with open(path, encoding="ascii") as fh:
            rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from None
    x = np.array([float(v) for v in rows[0][1:]])
    t = np.array([float(r[0]) for r in rows[1:]])
    field = np.array([[float(v) for v in r[1:]] for r in rows[1:]]).reshape(len(t), len(x))
    return t, x, field


def write_trajectories(tset, path) -> Path:
    """One column per path, one row per grid time; NaN after a path leaves the domain.

    Column labels are ``s<slit>_<k>``: the k-th seed of slit ``slit``.
    """
    counts = {}
    labels = []
    for s in tset.seeds:
        k = counts.get(s.slit, 0)
        counts[s.slit] = k + 1
        labels.append(f"s{s.slit}_{k}")
    lines = ["t," + ",".join(labels)]
    for k, t in enumerate(tset.t):
        lines.append(repr(float(t)) + "," + _fmt_row(tset.paths[:, k]))
    return write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))


def write_table(header: Sequence[str], rows, path) -> Path:
    """Small CSV table; floats in round-trip precision."""
    def cell(v):
        return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)

    lines = [",".join(header)] + [",".join(cell(v) for v in row) for row in rows]
    return write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))


def colorize(values: np.ndarray, palette) -> np.ndarray:
    """Map values in [0, 1] to uint8 rgb by piecewise-linear interpolation of the anchors."""
    pos = np.array([a for a, _ in palette])
    rgb = np.array([c for _, c in palette], dtype=float)
    v = np.clip(values, 0.0, 1.0)
    out = np.stack([np.interp(v, pos, rgb[:, c]) for c in range(3)], axis=-1)
    return np.rint(out).astype(np.uint8)


def heatmap_pixels(field: np.ndarray, palette: str = "intensity") -> np.ndarray:
    """Pixel array of shape (nx, nt + 1, 3) for a (nt + 1, nx) field."""
    if palette not in PALETTES:
        raise PaletteMismatch(f"unknown palette {palette!r}; use 'intensity' or 'diverging'")
    field = np.asarray(field, dtype=float)
    top = float(np.max(np.abs(field))) if field.size else 0.0
    if palette == "intensity":
        if top > 0 and field.min() < -NEGATIVE_TOL * top:
            raise PaletteMismatch("intensity palette needs a nonnegative field; use 'diverging'")
        scaled = field / top if top > 0 else np.zeros_like(field)
    else:
        if not field.min() < 0:
            raise PaletteMismatch("diverging palette needs a signed field; use 'intensity'")
        scaled = 0.5 + 0.5 * field / top
    # rows: x from x_max down; columns: time
    return colorize(scaled.T[::-1], PALETTES[palette])


def render_heatmap(field: np.ndarray, grid: GridSpec, palette: str, path) -> Path:
    field = np.asarray(field, dtype=float)
    if field.shape != (grid.nt + 1, grid.nx):
        raise ValueError(f"field shape {field.shape} does not match grid ({grid.nt + 1}, {grid.nx})")
    pixels = heatmap_pixels(field, palette)
    h, w, _ = pixels.shape
    return write_bytes(path, f"P6\n{w} {h}\n255\n".encode("ascii") + pixels.tobytes())


def read_ppm(path):
    """Parse a P6 file written by :func:`render_heatmap`; returns (width, height, pixels)."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic, dims, maxval, body = data.split(b"\n", 3)
    if magic != b"P6" or maxval != b"255":
        raise ValueError("not an 8-bit P6 pixmap")
    w, h = map(int, dims.split())
    return w, h, np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3)
