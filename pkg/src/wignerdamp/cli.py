"""Command-line front end: ``wignerdamp {run,sweep,width,validate}``.

Exit codes: 0 success, 1 configuration error, 2 runtime failure,
3 failed validation check.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import warnings
from pathlib import Path

from . import experiments, io
from .config import ConfigError, build_config, describe_keys, load_raw
from .kernels import CorrelationKernel
from .observables import transmission
from .solver import BoundaryWarning, run
from .validation import run_checks

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_VALIDATION = 0, 1, 2, 3

log = logging.getLogger("wignerdamp")


def parse_kernel(text: str) -> CorrelationKernel:
    """``coherent``, ``sech4``, ``sech:4``, ``exponential2`` or ``exp:2``."""
    t = text.strip().lower().replace(":", "")
    if t in ("coherent", "inf", "sechinf"):
        return CorrelationKernel.coherent()
    for prefix, make in (("sech", CorrelationKernel.sech), ("exponential", CorrelationKernel.exponential),
                         ("exp", CorrelationKernel.exponential)):
        if t.startswith(prefix):
            try:
                lam = float(t[len(prefix):])
            except ValueError:
                break
            if not lam > 0:
                raise ConfigError("lambda must be positive")
            return make(lam)
    raise ConfigError(f"cannot parse kernel {text!r} (use coherent, sech<lambda> or exp<lambda>)")


def parse_floats(text: str, name: str) -> list[float]:
    """Comma list, or ``start:stop:step`` with stop included."""
    try:
        if ":" in text:
            start, stop, step = (float(s) for s in text.split(":"))
            if not step > 0:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 10) for i in range(n)]
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse --{name} {text!r}") from None


def _config(args, study: bool):
    raw = load_raw(args.config, args.set)
    if study:
        raw.setdefault("dt", str(experiments.EXPERIMENT_DT))
    cfg = build_config(raw)
    if "record_every" not in raw:
        cfg = cfg.replace(record_every=max(1, round(1.0 / cfg.dt)) if study else 1)
    return cfg


def cmd_run(args) -> int:
    cfg = _config(args, study=False)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryWarning)
        res = run(cfg)
    for msg in res.warnings:
        log.warning(msg)
    tr = transmission(res.moments[-1].p_avg, cfg.p0)
    case = experiments.CaseResult(cfg, res, tr.value, tr.raw)
    files = experiments.write_case_report(case, args.out, figures=not args.no_figures)
    print(f"t={res.moments[-1].t:g} <p>={case.p_avg_final:.6g} T={case.T:.6g}; {len(files)} files in {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = _config(args, study=True)
    energies = parse_floats(args.energies, "energies")
    kernels = [parse_kernel(k) for k in args.kernels.split(",")]

    def show(row):
        status = row["error"] or f"T={row['T']:.5f}"
        print(f"E_K={row['E_K']:<5g} {row['kernel']:<10} {status}", flush=True)

    rows = experiments.transmission_sweep(energies, kernels, base=base, out_dir=args.out,
                                          progress=show, figures=not args.no_figures)
    failed = sum(1 for r in rows if r["error"])
    print(f"{len(rows)} cells, {failed} failed; table in {Path(args.out) / 'transmission.csv'}")
    return EXIT_RUNTIME if failed else EXIT_OK


def cmd_width(args) -> int:
    base = _config(args, study=True)
    widths = parse_floats(args.widths, "widths")

    def show(row):
        print(f"a={row['a']:<4g} jump={row['jump_metric']:.5f} smooth={row['smooth']}", flush=True)

    experiments.width_study(widths, base=base, out_dir=args.out, window=args.window,
                            figures=not args.no_figures, progress=show)
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_checks(full=args.full, report=lambda r: print(r.line(), flush=True))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    epilog = "configuration keys (file lines or --set key=value):\n" + describe_keys()
    parser = argparse.ArgumentParser(prog="wignerdamp", description="Wigner barrier scattering with correlation damping.",
                                     epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out):
        p.add_argument("--config", help="key = value file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one key")
        p.add_argument("--out", default=out, help=f"output directory (default {out})")
        p.add_argument("--no-figures", action="store_true", help="skip the matplotlib figures")

    fmt = argparse.RawDescriptionHelpFormatter
    p = sub.add_parser("run", help="single case", epilog=epilog, formatter_class=fmt)
    common(p, "out/run")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="transmission coefficient over energies and kernels", epilog=epilog,
                       formatter_class=fmt,
                       description=f"Study defaults: dt={experiments.EXPERIMENT_DT}, tau=3, sigma0=0.1*E_K.")
    common(p, "out/sweep")
    p.add_argument("--energies", default="0.5:2.0:0.1", help="comma list or start:stop:step (default 0.5:2.0:0.1)")
    p.add_argument("--kernels", default="coherent,sech10,sech4", help="comma list (default coherent,sech10,sech4)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("width", help="density-jump study over barrier widths", epilog=epilog, formatter_class=fmt,
                       description=f"E_K=0.5, sech 4, tau=3; study default dt={experiments.EXPERIMENT_DT}.")
    common(p, "out/width")
    p.add_argument("--widths", default="1,2,5,8", help="comma list (default 1,2,5,8)")
    p.add_argument("--window", type=float, default=experiments.JUMP_WINDOW,
                   help=f"half-width around x=0 for the jump metric (default {experiments.JUMP_WINDOW})")
    p.set_defaults(func=cmd_width)

    p = sub.add_parser("validate", help="oracle and property checks")
    p.add_argument("--full", action="store_true", help="include the full-length runs (several minutes)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (io.OutputError, ArithmeticError, ValueError, MemoryError) as exc:
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
