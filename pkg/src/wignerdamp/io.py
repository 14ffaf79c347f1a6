"""On-disk formats: moment CSVs, binary field snapshots, PPM heatmaps."""
from __future__ import annotations

import csv
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .grid import PhaseSpaceGrid, WignerField, build_grid
from .observables import MomentRecord

SNAPSHOT_MAGIC = "WIG1"
MOMENT_COLUMNS = MomentRecord.columns()
HEATMAP_EPS = 1e-300


class OutputError(OSError):
    pass


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _open_for_write(path, mode="w", **kw):
    path = Path(path)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, mode, **kw)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_moments_csv(series: Iterable[MomentRecord], path) -> Path:
    with _open_for_write(path, newline="", encoding="utf-8") as fh:
        fh.write(",".join(MOMENT_COLUMNS) + "\n")
        for rec in series:
            fh.write(",".join(_fmt(v) for v in rec.as_tuple()) + "\n")
    return Path(path)


def read_moments_csv(path) -> list[MomentRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != MOMENT_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        return [MomentRecord(*map(float, row)) for row in reader if row]


def write_table_csv(rows: Sequence[dict], path, columns: Sequence[str] | None = None) -> Path:
    columns = list(columns or (rows[0].keys() if rows else []))
    with _open_for_write(path, newline="", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            cells = []
            for c in columns:
                v = row.get(c, "")
                cells.append(_fmt(v) if isinstance(v, (float, np.floating)) else str(v))
            fh.write(",".join(cells) + "\n")
    return Path(path)


def write_profile_csv(x, values, path, names=("x", "n")) -> Path:
    with _open_for_write(path, newline="", encoding="utf-8") as fh:
        fh.write(",".join(names) + "\n")
        for xi, vi in zip(x, values):
            fh.write(f"{_fmt(xi)},{_fmt(vi)}\n")
    return Path(path)


def write_snapshot(field: WignerField, path) -> Path:
    """ASCII header line then row-major little-endian float64 values."""
    g = field.grid
    header = " ".join([SNAPSHOT_MAGIC, str(g.n_x), str(g.n_p)]
                      + [_fmt(v) for v in (g.x_min, g.x_max, g.p_min, g.p_max, g.hbar, field.time)])
    with _open_for_write(path, "wb") as fh:
        fh.write(header.encode("ascii") + b"\n")
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    return Path(path)


def read_snapshot(path) -> WignerField:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if not header or header[0] != SNAPSHOT_MAGIC or len(header) != 9:
            raise ValueError(f"{path}: not a {SNAPSHOT_MAGIC} snapshot")
        n_x, n_p = int(header[1]), int(header[2])
        x_min, x_max, p_min, p_max, hbar, t = map(float, header[3:])
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != n_x * n_p:
        raise ValueError(f"{path}: expected {n_x * n_p} values, found {data.size}")
    grid = build_grid(x_min, x_max, n_x, p_min, p_max, n_p, hbar)
    return WignerField(grid, data.reshape(n_x, n_p).astype(float), t)


def diverging_rgb(values: np.ndarray, scale: float) -> np.ndarray:
    """Blue (negative) - white (0) - red (positive), symmetric about 0."""
    u = np.clip(values / scale, -1.0, 1.0)
    pos = np.clip(u, 0.0, 1.0)
    neg = np.clip(-u, 0.0, 1.0)
    r = 1.0 - neg
    g = 1.0 - np.maximum(pos, neg)
    b = 1.0 - pos
    rgb = np.stack([r, g, b], axis=-1)
    return np.rint(rgb * 255).astype(np.uint8)


def write_heatmap(field: WignerField, path) -> tuple[Path, Path]:
    """Binary PPM of f with x along the width and p increasing upwards.

    The colour scale is symmetric, [-s, s] with s = max|f| (a fixed tiny range
    for an all-zero field); bounds go to ``<path>.scale.txt``.
    """
    scale = float(np.abs(field.values).max())
    if not scale > 0:
        scale = HEATMAP_EPS
    rgb = diverging_rgb(field.values.T[::-1, :], scale)
    h, w = rgb.shape[:2]
    path = Path(path)
    with _open_for_write(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())
    side = path.with_name(path.name + ".scale.txt")
    g = field.grid
    with _open_for_write(side, encoding="utf-8") as fh:
        fh.write(f"vmin {_fmt(-scale)}\nvmax {_fmt(scale)}\n")
        fh.write(f"x {_fmt(g.x_min)} {_fmt(g.x_max)}\np {_fmt(g.p_min)} {_fmt(g.p_max)}\nt {_fmt(field.time)}\n")
    return path, side


def read_ppm(path) -> np.ndarray:
    # only reads the header layout written by write_heatmap (no comments)
    with open(path, "rb") as fh:
        if fh.readline().strip() != b"P6":
            raise ValueError(f"{path}: not a binary PPM")
        w, h = map(int, fh.readline().split())
        fh.readline()
        data = fh.read()
    return np.frombuffer(data, dtype=np.uint8)[: w * h * 3].reshape(h, w, 3)


def ensure_dir(path) -> Path:
    path = Path(path)
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create {path}: {exc.strerror or exc}") from exc
    return path
