"""Phase-space lattice and the momentum <-> correlation-variable transform pair.

The Wigner function is stored as a real array ``values[i, j] = f(x_i, p_j)``
(rows at fixed x, columns at fixed p).  The correlation variable ``eta`` is
conjugate to ``p`` through

    g(x, eta) = dp * sum_j f(x, p_j) exp(i eta p_j / hbar)

so that ``g(x, 0)`` is the density at ``x``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft


class NonRealFieldError(ValueError):
    """Inverse transform produced a significant imaginary part."""


@dataclass(frozen=True)
class PhaseSpaceGrid:
    x_min: float
    x_max: float
    n_x: int
    p_min: float
    p_max: float
    n_p: int
    hbar: float = 1.0

    def __post_init__(self):
        if self.n_x % 2:
            raise ValueError("odd position count")
        if self.n_p % 2:
            raise ValueError("odd momentum count")
        for name in ("n_x", "n_p"):
            n = getattr(self, name)
            if int(n) != n or n < 8:
                raise ValueError(f"{name} must be an integer >= 8, got {n}")
        if not self.x_min < self.x_max:
            raise ValueError("degenerate x bounds")
        if not self.p_min < self.p_max:
            raise ValueError("degenerate p bounds")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_x

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.n_p

    @property
    def deta(self) -> float:
        return 2 * np.pi * self.hbar / (self.n_p * self.dp)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_x)

    @property
    def p(self) -> np.ndarray:
        return self.p_min + self.dp * np.arange(self.n_p)

    @property
    def eta_index(self) -> np.ndarray:
        """Integer labels k = -n_p/2, ..., n_p/2 - 1 of the eta lattice."""
        return np.arange(-self.n_p // 2, self.n_p // 2)

    @property
    def eta(self) -> np.ndarray:
        return self.eta_index * self.deta

    @property
    def eta_rfft(self) -> np.ndarray:
        """Non-negative eta values k*deta, k = 0..n_p/2, in real-FFT order."""
        return np.arange(self.n_p // 2 + 1) * self.deta

    @property
    def cell(self) -> float:
        return self.dx * self.dp

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_x, self.n_p)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)


def build_grid(x_min, x_max, n_x, p_min, p_max, n_p, hbar=1.0) -> PhaseSpaceGrid:
    return PhaseSpaceGrid(float(x_min), float(x_max), int(n_x),
                          float(p_min), float(p_max), int(n_p), float(hbar))


@dataclass
class WignerField:
    grid: PhaseSpaceGrid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"field shape {self.values.shape} does not match grid {self.grid.shape}")

    def norm(self) -> float:
        return float(self.values.sum() * self.grid.cell)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def copy(self) -> "WignerField":
        return WignerField(self.grid, self.values.copy(), self.time)

    def with_values(self, values, time=None) -> "WignerField":
        return WignerField(self.grid, values, self.time if time is None else time)


def _phase(grid: PhaseSpaceGrid) -> np.ndarray:
    # exp(i eta_k p_min / hbar) for k in ascending lattice order
    return np.exp(1j * grid.eta * grid.p_min / grid.hbar)


def p_to_eta(row, grid: PhaseSpaceGrid) -> np.ndarray:
    """Transform values over p (last axis) to the eta lattice.

    Works on a single row or on a stack of rows; output is aligned with
    ``grid.eta`` (ascending k).
    """
    row = np.asarray(row, dtype=float)
    if row.shape[-1] != grid.n_p:
        raise ValueError(f"expected {grid.n_p} momentum samples, got {row.shape[-1]}")
    # sum_j f_j exp(+2 pi i k j / n) == n * ifft(f)[k]
    g = sfft.ifft(row, axis=-1) * grid.n_p
    g = np.fft.fftshift(g, axes=-1)
    return grid.dp * _phase(grid) * g


def eta_to_p(g, grid: PhaseSpaceGrid, rtol: float = 1e-8) -> np.ndarray:
    """Exact inverse of :func:`p_to_eta`; raises NonRealFieldError if the
    result is not real to within ``rtol`` of its largest modulus."""
    g = np.asarray(g, dtype=complex)
    if g.shape[-1] != grid.n_p:
        raise ValueError(f"expected {grid.n_p} eta samples, got {g.shape[-1]}")
    h = np.fft.ifftshift(g / (grid.dp * _phase(grid)), axes=-1)
    out = sfft.fft(h, axis=-1) / grid.n_p
    scale = np.abs(out).max() if out.size else 0.0
    if scale > 0 and np.abs(out.imag).max() > rtol * scale:
        raise NonRealFieldError(
            f"non-real field: imaginary residue {np.abs(out.imag).max():.3e} "
            f"exceeds {rtol:g} of max modulus {scale:.3e}")
    return out.real.copy()


def eta_symbol(values, grid: PhaseSpaceGrid) -> np.ndarray:
    """Restrict a Hermitian symbol sampled on ``grid.eta_rfft`` to real-FFT form.

    The unpaired Nyquist entry keeps only its real part, which is what a
    real-to-real transform pair can represent.
    """
    s = np.array(values, dtype=complex)
    s[..., -1] = s[..., -1].real
    return s


def apply_eta_symbol(values: np.ndarray, symbol: np.ndarray, grid: PhaseSpaceGrid) -> np.ndarray:
    """Multiply the eta-transform of every row by ``symbol`` and transform back.

    ``symbol[..., m]`` is the multiplier at ``eta = m * deta`` (m = 0..n_p/2)
    and must satisfy M(-eta) = conj(M(eta)).  Real-FFT fast path equivalent to
    ``eta_to_p(M * p_to_eta(row))``.
    """
    # rfft uses exp(-i ...), i.e. it samples g at -eta; hence the conjugate
    spec = sfft.rfft(values, axis=-1)
    spec *= np.conj(symbol)
    return sfft.irfft(spec, n=grid.n_p, axis=-1)


def quadrature_weights(n: int, order: int = 0) -> np.ndarray:
    """Per-point weights (in units of the spacing) for phase-space sums.

    ``order=0`` is the equal-weight rectangle rule used throughout.  ``order=1``
    and ``order=2`` apply a composite open Newton-Cotes rule over consecutive
    panels of 2 and 3 points; the remaining points fall back to unit weight.
    """
    w = np.ones(n)
    if order == 0:
        return w
    # open rules: m interior nodes of a panel of m+1 sub-intervals
    panels = {1: np.array([1.5, 1.5]), 2: np.array([8.0, -4.0, 8.0]) / 3.0}
    if order not in panels:
        raise ValueError(f"unsupported open Newton-Cotes order {order}")
    pw = panels[order]
    m = len(pw)
    # a panel's m nodes plus the unsampled endpoint between panels span m+1 spacings
    step = m + 1
    w = np.zeros(n)
    i = 0
    while i + m <= n:
        w[i:i + m] += pw
        i += step
    # leftover points keep rectangle weight; full panels already sum to m+1
    w[i:] = 1.0
    return w
