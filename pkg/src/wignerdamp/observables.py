"""Moments, marginals and scattering diagnostics of a Wigner field."""
from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

from .grid import WignerField


@dataclass(frozen=True)
class MomentRecord:
    t: float
    x_avg: float
    p_avg: float
    sigma20: float
    sigma02: float
    sigma11: float
    norm: float
    energy: float

    @classmethod
    def columns(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)


def density(field: WignerField) -> np.ndarray:
    return field.values.sum(axis=1) * field.grid.dp


def current(field: WignerField) -> np.ndarray:
    return field.values @ field.grid.p * field.grid.dp


def energy_density(field: WignerField) -> np.ndarray:
    return field.values @ (0.5 * field.grid.p ** 2) * field.grid.dp


def moments(field: WignerField) -> MomentRecord:
    """Averages about the instantaneous means, normalised by the current norm.

    Two passes over the field: the means first, then the central moments,
    which keeps broad flat fields free of cancellation.
    """
    g = field.grid
    f = field.values
    x, p = g.x, g.p
    first = f @ np.stack([np.ones_like(p), p], axis=1)
    n = first[:, 0] * g.dp
    mass = n.sum() * g.dx
    x_avg = float(x @ n * g.dx / mass)
    p_avg = float(first[:, 1].sum() * g.cell / mass)

    dp_ = p - p_avg
    second = f @ np.stack([dp_, dp_ ** 2, 0.5 * p ** 2], axis=1) * g.dp
    dx_ = x - x_avg
    sigma20 = float(dx_ ** 2 @ n * g.dx / mass)
    sigma02 = float(second[:, 1].sum() * g.dx / mass)
    sigma11 = float(dx_ @ second[:, 0] * g.dx / mass)
    energy = float(second[:, 2].sum() * g.dx)
    return MomentRecord(field.time, x_avg, p_avg, sigma20, sigma02, sigma11, float(mass), energy)


@dataclass(frozen=True)
class Transmission:
    value: float
    raw: float
    clamped: bool


def transmission(p_avg_final: float, p0: float) -> Transmission:
    """T = (1 + <p>_final / p0) / 2, clamped to [0, 1]."""
    if not p0 > 0:
        raise ValueError("p0 must be positive")
    raw = 0.5 * (1.0 + p_avg_final / p0)
    value = min(1.0, max(0.0, raw))
    return Transmission(value, raw, value != raw)


def jump_metric(n, x, window: float) -> float:
    """Steepest relative slope of a density profile within |x| <= window.

    max |n[i+1] - n[i]| / dx over neighbouring pairs whose both ends lie in the
    window, divided by max(n).  Returns 0 for a vanishing profile.
    """
    if not window > 0:
        raise ValueError("window must be positive")
    n = np.asarray(n, dtype=float)
    x = np.asarray(x, dtype=float)
    peak = np.abs(n).max()
    if peak == 0:
        return 0.0
    dx = x[1] - x[0]
    inside = np.abs(x) <= window
    pair = inside[:-1] & inside[1:]
    if not pair.any():
        return 0.0
    slope = np.abs(np.diff(n))[pair] / dx
    return float(slope.max() / peak)
