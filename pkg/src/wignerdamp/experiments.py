"""Scripted barrier-scattering studies.

* :func:`paper_case` runs one (E_K, kernel) case and writes its report,
* :func:`transmission_sweep` tabulates T over energies and kernels,
* :func:`width_study` measures how the density jump at the barrier depends
  on the barrier width.

All studies share :func:`study_config`: tau = 3, sigma0 = 0.1 E_K (read as
the momentum standard deviation of the initial minimum-uncertainty packet)
and a time step of :data:`EXPERIMENT_DT`.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import io, plotting
from .config import config_to_text
from .kernels import CorrelationKernel
from .observables import density, jump_metric, transmission
from .potential import Barrier
from .solver import BoundaryWarning, RunResult, SimulationConfig, run

log = logging.getLogger(__name__)

EXPERIMENT_DT = 0.05
EXPERIMENT_TAU = 3.0
CANONICAL_ENERGIES = (0.5, 1.0, 1.5)
SWEEP_ENERGIES = tuple(round(0.5 + 0.1 * i, 10) for i in range(16))
DEFAULT_WIDTHS = (1.0, 2.0, 5.0, 8.0)
JUMP_WINDOW = 1.0

CONVENTION_NOTE = (
    "# sigma0 = 0.1*E_K is the momentum standard deviation of the initial packet;\n"
    "# position std = hbar/(2*sigma0) (minimum uncertainty, product of variances hbar^2/4).\n"
    "# sigma0 is read as a standard deviation throughout, never as a variance.\n"
)


def study_kernels() -> tuple[CorrelationKernel, ...]:
    return (CorrelationKernel.coherent(), CorrelationKernel.sech(10.0), CorrelationKernel.sech(4.0))


def default_base() -> SimulationConfig:
    return SimulationConfig(dt=EXPERIMENT_DT, record_every=round(1.0 / EXPERIMENT_DT))


def study_config(E_K: float, kernel: CorrelationKernel, base: SimulationConfig | None = None,
                 **changes) -> SimulationConfig:
    """``base`` with the study's physical parameters for one case.

    tau is fixed at 3 and sigma0 follows 0.1 E_K; numerical settings, hbar
    and the barrier come from ``base`` unless overridden in ``changes``.
    """
    base = base or default_base()
    return base.replace(E_K=E_K, kernel=kernel, tau=EXPERIMENT_TAU, sigma0=None, **changes)


def _tag(t: float) -> str:
    return f"t{t:06.2f}".replace(".", "p")


@dataclass
class CaseResult:
    config: SimulationConfig
    result: RunResult
    T: float
    T_raw: float
    files: list[Path] = field(default_factory=list)

    @property
    def p_avg_final(self) -> float:
        return self.result.moments[-1].p_avg


def write_case_report(case: CaseResult, out_dir, figures: bool = True) -> list[Path]:
    """Moments CSV, per-snapshot density CSVs, snapshots, heatmaps and figures."""
    out = io.ensure_dir(out_dir)
    res, cfg = case.result, case.config
    files = [io.write_moments_csv(res.moments, out / "moments.csv")]
    for t, fld in sorted(res.snapshots.items()):
        tag = _tag(t)
        files.append(io.write_profile_csv(fld.grid.x, density(fld), out / f"density_{tag}.csv"))
        files.append(io.write_snapshot(fld, out / f"wigner_{tag}.wig"))
        files.extend(io.write_heatmap(fld, out / f"wigner_{tag}.ppm"))
    label = f"E_K={cfg.E_K:g}, {cfg.kernel.label}"
    if figures:
        files.append(plotting.plot_moments(res.moments, out / "moments.png", label))
        if res.snapshots:
            files.append(plotting.plot_densities(res.snapshots, out / "densities.png", label))
            last = max(res.snapshots)
            files.append(plotting.plot_wigner(res.snapshots[last], out / f"wigner_{_tag(last)}.png"))
    lines = [CONVENTION_NOTE, config_to_text(cfg),
             f"# x0 used: {cfg.x_start!r}",
             f"# T = {case.T!r} (raw {case.T_raw!r}), <p>(t_final) = {case.p_avg_final!r}",
             f"# boundary warning time: {res.boundary_warning_time}"]
    report = out / "report.txt"
    with open(report, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    files.append(report)
    case.files.extend(files)
    return files


def paper_case(E_K: float, kernel: CorrelationKernel, out_dir=None, base: SimulationConfig | None = None,
               figures: bool = True, **changes) -> CaseResult:
    """Run one case; writes the report to ``out_dir`` when given."""
    cfg = study_config(E_K, kernel, base, **changes)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryWarning)
        res = run(cfg)
    for msg in res.warnings:
        log.warning("%s: %s", cfg.kernel.label, msg)
    tr = transmission(res.moments[-1].p_avg, cfg.p0)
    case = CaseResult(cfg, res, tr.value, tr.raw)
    if out_dir is not None:
        write_case_report(case, out_dir, figures)
    return case


def _moment_at(res: RunResult, t: float):
    times = res.times
    i = int(np.argmin(np.abs(times - t)))
    return res.moments[i]


SWEEP_COLUMNS = ("E_K", "kernel", "lambda", "T", "p_avg_inf", "T_raw", "clamped",
                 "T_at_0p8tf", "sigma20", "sigma02", "max_abs_f", "boundary_warning_t", "error")


def transmission_sweep(E_K_values: Iterable[float] = SWEEP_ENERGIES,
                       kernels: Sequence[CorrelationKernel] | None = None,
                       base: SimulationConfig | None = None, out_dir=None,
                       progress: Callable[[dict], None] | None = None,
                       figures: bool = True) -> list[dict]:
    """T(E_K, lambda) from the final average momentum of each run.

    A failing cell is recorded with its error text and NaN values and the
    sweep moves on.  ``T_at_0p8tf`` repeats the estimate at 0.8 t_final as a
    check of the sensitivity to the end time.
    """
    kernels = tuple(kernels) if kernels is not None else study_kernels()
    rows = []
    for E in E_K_values:
        if not E > 0:
            raise ValueError(f"E_K values must be positive, got {E}")
        for k in kernels:
            row = dict.fromkeys(SWEEP_COLUMNS, math.nan)
            row.update(E_K=float(E), kernel=k.label, **{"lambda": k.correlation_length},
                       clamped="", boundary_warning_t="", error="")
            try:
                case = paper_case(E, k, base=base)
            except Exception as exc:  # recorded per cell, the sweep continues
                log.error("sweep cell E_K=%g %s failed: %s", E, k.label, exc)
                row["error"] = f"{type(exc).__name__}: {exc}".replace(",", ";")
            else:
                res, cfg = case.result, case.config
                early = _moment_at(res, 0.8 * cfg.t_final)
                row.update(T=case.T, p_avg_inf=case.p_avg_final, T_raw=case.T_raw,
                           clamped=str(case.T != case.T_raw).lower(),
                           T_at_0p8tf=transmission(early.p_avg, cfg.p0).value,
                           sigma20=res.moments[-1].sigma20, sigma02=res.moments[-1].sigma02,
                           max_abs_f=float(np.abs(res.final.values).max()),
                           boundary_warning_t="" if res.boundary_warning_time is None
                           else f"{res.boundary_warning_time:g}")
            rows.append(row)
            if progress:
                progress(row)
    if out_dir is not None:
        out = io.ensure_dir(out_dir)
        io.write_table_csv(rows, out / "transmission.csv", SWEEP_COLUMNS)
        if figures:
            plotting.plot_transmission(rows, out / "transmission.png")
    return rows


WIDTH_COLUMNS = ("a", "jump_metric", "smooth_bound", "smooth", "T", "x0", "boundary_warning_t")


def smooth_bound(sigma: float) -> float:
    """Largest relative slope of a Gaussian profile of standard deviation sigma."""
    return math.exp(-0.5) / sigma


def width_study(a_values: Iterable[float] = DEFAULT_WIDTHS, base: SimulationConfig | None = None,
                out_dir=None, E_K: float = 0.5, kernel: CorrelationKernel | None = None,
                window: float = JUMP_WINDOW, figures: bool = True,
                progress: Callable[[dict], None] | None = None) -> list[dict]:
    """Jump metric of n(x, t_final) within ``window`` of the barrier centre.

    Unless ``base`` fixes x0, all widths share the automatic start point of
    the widest barrier.

    A profile counts as smooth when its metric is below the steepest relative
    slope of a Gaussian with the final position spread sqrt(sigma20).
    """
    kernel = kernel or CorrelationKernel.sech(4.0)
    a_values = [float(a) for a in a_values]
    for a in a_values:
        if not a > 0:
            raise ValueError(f"barrier widths must be positive, got {a}")
    b = base or default_base()
    # Every width starts from one point, the automatic start for the widest
    # barrier, so that only a changes between rows.
    x0 = b.x0
    if x0 is None and a_values:
        x0 = min(study_config(E_K, kernel, b, barrier=Barrier(a, b.barrier.height)).x_start
                 for a in a_values)
    rows, profiles = [], {}
    for a in a_values:
        case = paper_case(E_K, kernel, base=b, barrier=Barrier(a, b.barrier.height), x0=x0)
        fld = case.result.final
        n = density(fld)
        metric = jump_metric(n, fld.grid.x, window)
        bound = smooth_bound(math.sqrt(case.result.moments[-1].sigma20))
        row = dict(a=float(a), jump_metric=metric, smooth_bound=bound,
                   smooth=str(metric < bound).lower(), T=case.T, x0=case.config.x_start,
                   boundary_warning_t="" if case.result.boundary_warning_time is None
                   else f"{case.result.boundary_warning_time:g}")
        rows.append(row)
        profiles[float(a)] = (fld.grid.x, n)
        if progress:
            progress(row)
        if out_dir is not None:
            io.write_profile_csv(fld.grid.x, n, Path(io.ensure_dir(out_dir)) / f"density_a{a:g}.csv")
    if out_dir is not None:
        out = io.ensure_dir(out_dir)
        io.write_table_csv(rows, out / "width.csv", WIDTH_COLUMNS)
        if figures:
            plotting.plot_width_profiles(profiles, out / "width_profiles.png")
    return rows
