"""Property and oracle checks behind the ``validate`` subcommand.

Each check builds its own configuration, runs it, and returns a
:class:`CheckResult` holding the measured quantity and the limit it was held
to.  The slow checks (full-length runs) are flagged so callers can skip them.
"""
from __future__ import annotations

import filecmp
import math
import tempfile
import time
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import io
from .grid import WignerField
from .kernels import CorrelationKernel
from .observables import MomentRecord, density, moments
from .oracle import (fokker_planck_gaussian, flat_potential_moments, gaussian_wigner,
                     schrodinger_run, wigner_transform)
from .potential import Barrier
from .solver import BoundaryWarning, SimulationConfig, SplittingSolver, run

MOMENT_FIELDS = ("x_avg", "p_avg", "sigma20", "sigma02", "sigma11")


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    limit: float
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.detail} (value {self.value:.3e}, limit {self.limit:.3e}, {self.seconds:.1f}s)"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def check_norm_conservation(config: SimulationConfig | None = None, tol: float = 1e-10) -> CheckResult:
    """|norm(t) - 1| over every recorded time of a full run (default: E_K=0.5, sech 4)."""
    cfg = config or SimulationConfig(E_K=0.5, kernel=CorrelationKernel.sech(4.0), tau=3.0, record_every=10)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryWarning)
        res = run(cfg)
    drift = float(np.max(np.abs(res.series("norm") - 1.0)))
    return CheckResult("norm conservation", drift < tol, drift, tol,
                       f"{len(res.moments)} records to t={cfg.t_final:g}, dt={cfg.dt:g}, grid {cfg.n_x}x{cfg.n_p}")


@_timed
def check_kick_density(seed: int = 1234, tol: float = 1e-12) -> CheckResult:
    """One kick (barrier plus sech 4 collisions) on a random normalised field."""
    cfg = SimulationConfig(kernel=CorrelationKernel.sech(4.0))
    solver = SplittingSolver(cfg)
    rng = np.random.default_rng(seed)
    f = rng.random(solver.grid.shape)
    f /= f.sum() * solver.grid.cell
    before = density(WignerField(solver.grid, f))
    after = density(WignerField(solver.grid, solver.kick(f, cfg.dt)))
    err = float(np.abs(after - before).max())
    return CheckResult("collision density invariance", err < tol, err, tol, "max pointwise change of n(x)")


def _worst_moment_error(rec: MomentRecord, ref: MomentRecord, fields=MOMENT_FIELDS) -> tuple[float, str]:
    errs = {k: abs(getattr(rec, k) - getattr(ref, k)) for k in fields}
    key = max(errs, key=errs.get)
    return errs[key], key


@_timed
def check_free_transport(t: float = 10.0, tol: float = 1e-6) -> CheckResult:
    """Flat potential, coherent: moments against the closed-form trajectory."""
    cfg = SimulationConfig(barrier=Barrier.flat(), t_final=t, dt=0.05, snapshot_times=(), record_every=10 ** 9)
    res = run(cfg)
    err, key = _worst_moment_error(res.moments[-1], flat_potential_moments(cfg, t))
    return CheckResult("free transport analytics", err < tol, err, tol, f"worst moment {key} at t={t:g}")


@_timed
def check_pumping_rate(lam: float, t: float = 30.0, rtol: float = 5e-3) -> CheckResult:
    """Flat potential, sech lambda, hbar = 1: growth of sigma02 against hbar^2 t / (lambda^2 tau)."""
    cfg = SimulationConfig(E_K=0.5, kernel=CorrelationKernel.sech(lam), tau=3.0, hbar=1.0,
                           barrier=Barrier.flat(), t_final=t, dt=0.05, snapshot_times=(),
                           record_every=10 ** 9)
    res = run(cfg)
    growth = res.moments[-1].sigma02 - res.moments[0].sigma02
    expected = t * cfg.hbar ** 2 / (lam ** 2 * cfg.tau)
    rel = abs(growth / expected - 1.0)
    return CheckResult(f"decoherence pumping rate (sech {lam:g})", rel < rtol, rel, rtol,
                       f"sigma02 grew by {growth:.6f}, expected {expected:.6f}")


def fokker_planck_setup(lambda2: float = 1.0 / 32.0) -> tuple[SimulationConfig, MomentRecord]:
    """Configuration and initial moments for the Fokker-Planck comparison.

    The clamped quadratic kernel only equals the Fokker-Planck operator while
    the field's eta-transform vanishes beyond the clamp.  A broad mixed Gaussian
    (position std 20, momentum std sqrt(2)) keeps the conditional momentum
    spread large, so its eta-width stays near 0.6 for the whole run.
    """
    cfg = SimulationConfig(E_K=0.5, kernel=CorrelationKernel.quadratic(lambda2), tau=3.0,
                           barrier=Barrier.flat(), x0=40.0, p_min=-10.0, p_max=12.0,
                           dt=0.05, snapshot_times=(), record_every=10 ** 9)
    initial = MomentRecord(0.0, 40.0, cfg.p0, 400.0, 2.0, 0.0, 1.0, 0.5 * (2.0 + cfg.p0 ** 2))
    return cfg, initial


@_timed
def check_fokker_planck(t: float = 10.0, tol: float = 1e-4) -> CheckResult:
    """Quadratic kernel, flat potential: L2 distance to the analytic diffusing Gaussian."""
    cfg, init = fokker_planck_setup()
    cfg = cfg.replace(t_final=t)
    grid = cfg.grid
    f0 = gaussian_wigner(grid, (init.x_avg, init.p_avg), [[init.sigma20, init.sigma11], [init.sigma11, init.sigma02]])
    res = run(cfg, initial=WignerField(grid, f0, 0.0))
    exact = fokker_planck_gaussian(cfg, t, grid, init)
    err = float(math.sqrt(np.sum((res.final.values - exact) ** 2) * grid.cell))
    return CheckResult("Fokker-Planck limit", err < tol, err, tol, f"L2 error at t={t:g}")


def coherent_oracle_errors(res, every: float = 1.0) -> tuple[float, str, float]:
    """Worst moment gap between a coherent run and the Schroedinger oracle.

    Compares at every recorded time that is a multiple of ``every``.
    Returns (error, moment name, time).
    """
    cfg = res.config
    keep = [m for m in res.moments if abs(m.t / every - round(m.t / every)) < 1e-9]
    traj = schrodinger_run(cfg, times=[m.t for m in keep])
    g = cfg.grid
    worst = (0.0, "", 0.0)
    for rec, psi in zip(keep, traj.psi):
        ref = moments(wigner_transform(psi, g.x_min, g.dx, cfg.hbar, rec.t))
        err, key = _worst_moment_error(rec, ref)
        if err > worst[0]:
            worst = (err, key, rec.t)
    return worst


@_timed
def check_coherent_oracle(E_K: float, t_final: float = 60.0, tol: float = 1e-3, dt: float = 0.05) -> CheckResult:
    cfg = SimulationConfig(E_K=E_K, t_final=t_final, dt=dt, record_every=round(1.0 / dt), snapshot_times=())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryWarning)
        res = run(cfg)
    err, key, t = coherent_oracle_errors(res)
    return CheckResult(f"coherent oracle (E_K={E_K:g})", err < tol, err, tol, f"worst {key} at t={t:g}")


def field_error(a: WignerField, b: WignerField) -> float:
    return float(math.sqrt(np.sum((a.values - b.values) ** 2) * a.grid.cell))


@_timed
def check_convergence(dt: float = 0.1, t: float = 12.0, lo: float = 3.5, hi: float = 4.5) -> CheckResult:
    """Strang order: error ratio e(dt) / e(dt/2) against a dt/8 reference."""
    base = SimulationConfig(E_K=0.5, kernel=CorrelationKernel.sech(4.0), tau=3.0, t_final=t,
                            snapshot_times=(), record_every=10 ** 9)
    finals = {}
    for h in (dt, dt / 2, dt / 8):
        finals[h] = run(base.replace(dt=h)).final
    e1 = field_error(finals[dt], finals[dt / 8])
    e2 = field_error(finals[dt / 2], finals[dt / 8])
    ratio = e1 / e2
    return CheckResult("self-convergence", lo <= ratio <= hi, ratio, hi,
                       f"e(dt={dt:g})={e1:.3e}, e(dt/2)={e2:.3e}, ratio within [{lo}, {hi}]")


@_timed
def check_determinism(config: SimulationConfig | None = None) -> CheckResult:
    """Two runs of one configuration give byte-identical CSV and snapshot files."""
    cfg = config or SimulationConfig(kernel=CorrelationKernel.sech(4.0), t_final=2.0, dt=0.05,
                                     snapshot_times=(1.0, 2.0))
    names = ["moments.csv"] + [f"snap_{i}.wig" for i in range(len(cfg.snapshot_times))]
    with tempfile.TemporaryDirectory() as tmp:
        dirs = []
        for k in range(2):
            d = Path(tmp) / f"run{k}"
            res = run(cfg)
            io.write_moments_csv(res.moments, d / "moments.csv")
            for i, t in enumerate(sorted(res.snapshots)):
                io.write_snapshot(res.snapshots[t], d / f"snap_{i}.wig")
            dirs.append(d)
        match, mismatch, errors = filecmp.cmpfiles(dirs[0], dirs[1], names, shallow=False)
    ok = len(match) == len(names)
    return CheckResult("determinism", ok, float(len(mismatch) + len(errors)), 0.0,
                       f"{len(match)}/{len(names)} files byte-identical")


FAST_CHECKS: list[Callable[[], CheckResult]] = [
    check_kick_density,
    check_free_transport,
    lambda: check_pumping_rate(4.0),
    lambda: check_pumping_rate(10.0),
    check_fokker_planck,
    check_determinism,
]

SLOW_CHECKS: list[Callable[[], CheckResult]] = [
    check_norm_conservation,
    check_convergence,
    lambda: check_coherent_oracle(0.5),
    lambda: check_coherent_oracle(1.0),
    lambda: check_coherent_oracle(1.5),
]


def run_checks(full: bool = False, report: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    results = []
    for check in FAST_CHECKS + (SLOW_CHECKS if full else []):
        res = check()
        results.append(res)
        if report:
            report(res)
    return results
