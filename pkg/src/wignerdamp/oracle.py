"""Independent references used to validate the Wigner solver.

* a split-operator Schroedinger propagator for the coherent case,
* a direct discrete Wigner-Weyl transform of a wavefunction,
* closed-form moment trajectories for runs without a potential.

Nothing here calls into the splitting solver or the eta transforms of
:mod:`wignerdamp.grid`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import PhaseSpaceGrid, WignerField, build_grid
from .kernels import lambda_coeffs
from .observables import MomentRecord
from .potential import eval_potential
from .solver import SimulationConfig


class NonRealTransformError(ValueError):
    pass


@dataclass
class Trajectory:
    x: np.ndarray
    dx: float
    hbar: float
    times: np.ndarray
    psi: np.ndarray  # (len(times), n_x)

    def at(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"no stored wavefunction at t={t}")
        return self.psi[i]


def gaussian_packet(config: SimulationConfig, x: np.ndarray) -> np.ndarray:
    """psi(x, 0) with momentum std sigma0 and position std hbar/(2 sigma0)."""
    s_x = config.position_std
    psi = (2 * math.pi * s_x ** 2) ** -0.25 * np.exp(
        -((x - config.x_start) ** 2) / (4 * s_x ** 2) + 1j * config.p0 * (x - config.x_start) / config.hbar)
    return psi


def schrodinger_run(config: SimulationConfig, times=None) -> Trajectory:
    """Propagate the initial packet under -(hbar^2/2) d^2/dx^2 + V(x).

    Strang splitting kinetic(dt/2) / potential(dt) / kinetic(dt/2) on the
    solver's periodic x grid with the solver's dt.  ``times`` defaults to every
    integer time up to ``t_final``.
    """
    if not config.kernel.is_coherent:
        raise ValueError(f"the Schroedinger oracle covers the coherent case only, got {config.kernel.label}")
    grid = config.grid
    x, dx, hbar, dt = grid.x, grid.dx, config.hbar, config.dt
    if times is None:
        times = np.arange(0.0, config.t_final + 0.5, 1.0)
        times = times[times <= config.t_final + 1e-12]
    times = np.asarray(times, dtype=float)
    steps = np.rint(times / dt).astype(int)
    if np.any(np.abs(steps * dt - times) > 1e-9 * np.maximum(1.0, times)):
        raise ValueError("requested times must be multiples of dt")

    k = 2 * np.pi * np.fft.fftfreq(grid.n_x, dx)
    half_kin = np.exp(-0.25j * hbar * k ** 2 * dt)
    full_kin = half_kin ** 2
    pot = np.exp(-1j * eval_potential(config.barrier, x) * dt / hbar)

    psi = gaussian_packet(config, x)
    psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * dx)
    out = np.empty((len(times), grid.n_x), dtype=complex)
    order = np.argsort(steps)
    current = 0
    for idx in order:
        target = steps[idx]
        n = target - current
        if n > 0:
            phi = np.fft.fft(psi) * half_kin
            for i in range(n):
                psi = np.fft.ifft(phi) * pot
                phi = np.fft.fft(psi) * (half_kin if i == n - 1 else full_kin)
            psi = np.fft.ifft(phi)
            current = target
        out[idx] = psi
    return Trajectory(x, dx, hbar, times, out)


def wigner_grid(x_min: float, n_x: int, dx: float, hbar: float) -> PhaseSpaceGrid:
    """Phase-space grid on which eta takes the values 2*m*dx exactly."""
    dp = math.pi * hbar / (n_x * dx)
    return build_grid(x_min, x_min + n_x * dx, n_x, -0.5 * n_x * dp, 0.5 * n_x * dp, n_x, hbar)


def wigner_transform(psi, x_min: float, dx: float, hbar: float, time: float = 0.0,
                     rtol: float = 1e-8) -> WignerField:
    """Discrete Wigner-Weyl transform of a wavefunction.

    f(x_i, p_j) = (1 / pi hbar) dx sum_m psi[i+m] conj(psi[i-m]) exp(-2i m dx p_j / hbar)

    with m in [-n/2, n/2) and psi taken as zero outside the domain.  Reading
    psi periodically instead would add an interference copy of every packet
    with its own periodic image half a domain away.
    """
    psi = np.asarray(psi, dtype=complex)
    n = psi.size
    grid = wigner_grid(x_min, n, dx, hbar)
    padded = np.concatenate([psi, np.zeros(n, dtype=complex)])
    k = np.arange(n)
    m = np.where(k < n // 2, k, k - n)  # FFT slot k holds lag m
    sign = np.where(k % 2, -1.0, 1.0)
    f = np.empty((n, n))
    # rows in blocks to bound the n x n complex temporary
    block = max(1, (1 << 22) // n)
    imag_max = 0.0
    for start in range(0, n, block):
        rows = np.arange(start, min(n, start + block))[:, None]
        rho = padded[(rows + m) % (2 * n)] * np.conj(padded[(rows - m) % (2 * n)]) * sign
        w = np.fft.fft(rho, axis=1) * (dx / (math.pi * hbar))
        imag_max = max(imag_max, float(np.abs(w.imag).max()))
        f[rows[:, 0]] = w.real
    scale = np.abs(f).max()
    if scale > 0 and imag_max > rtol * scale:
        raise NonRealTransformError(
            f"non-real transform: imaginary part {imag_max:.3e} vs max {scale:.3e}")
    return WignerField(grid, f, time)


def flat_potential_moments(config: SimulationConfig, t: float,
                           initial: MomentRecord | None = None) -> MomentRecord:
    """Exact moments at time ``t`` for V = 0 (Lambda1 = 0).

    With D = hbar^2 Lambda2 / tau the moment equations close:
    d sigma02/dt = 2D, d sigma11/dt = sigma02, d sigma20/dt = 2 sigma11.
    ``initial`` defaults to the analytic moments of the initial Gaussian.
    """
    if not config.barrier.is_flat:
        raise ValueError("flat_potential_moments requires a flat potential")
    lam1, lam2 = lambda_coeffs(config.kernel)
    if lam1 != 0.0:
        raise ValueError("closed forms assume Lambda1 = 0")
    if initial is None:
        initial = MomentRecord(0.0, config.x_start, config.p0, config.position_std ** 2,
                               config.momentum_std ** 2, 0.0, 1.0,
                               0.5 * (config.momentum_std ** 2 + config.p0 ** 2))
    D = config.hbar ** 2 * lam2 / config.tau
    s = t - initial.t
    s02 = initial.sigma02 + 2 * D * s
    s11 = initial.sigma11 + initial.sigma02 * s + D * s ** 2
    s20 = initial.sigma20 + 2 * initial.sigma11 * s + initial.sigma02 * s ** 2 + (2.0 / 3.0) * D * s ** 3
    x_avg = initial.x_avg + initial.p_avg * s
    energy = initial.energy + D * s * initial.norm
    return MomentRecord(t, x_avg, initial.p_avg, s20, s02, s11, initial.norm, energy)


def gaussian_wigner(grid: PhaseSpaceGrid, mean, cov) -> np.ndarray:
    """Normalised bivariate Gaussian on ``grid`` with mean (x, p) and 2x2 covariance."""
    cov = np.asarray(cov, dtype=float)
    inv = np.linalg.inv(cov)
    X = grid.x[:, None] - mean[0]
    P = grid.p[None, :] - mean[1]
    q = inv[0, 0] * X ** 2 + 2 * inv[0, 1] * X * P + inv[1, 1] * P ** 2
    return np.exp(-0.5 * q) / (2 * math.pi * math.sqrt(np.linalg.det(cov)))


def fokker_planck_gaussian(config: SimulationConfig, t: float, grid: PhaseSpaceGrid | None = None,
                           initial: MomentRecord | None = None) -> np.ndarray:
    """Analytic solution of f_t + p f_x = D f_pp started from a Gaussian.

    The Gaussian at t = 0 has the moments in ``initial`` (default: the
    minimum-uncertainty packet of ``config``); any Gaussian stays Gaussian.
    """
    grid = grid or config.grid
    m = flat_potential_moments(config, t, initial)
    cov = [[m.sigma20, m.sigma11], [m.sigma11, m.sigma02]]
    return gaussian_wigner(grid, (m.x_avg, m.p_avg), cov)
