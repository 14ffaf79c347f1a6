"""Flat ``key = value`` configuration files for :class:`SimulationConfig`."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Mapping

from .kernels import KERNEL_NAMES, CorrelationKernel
from .potential import Barrier
from .solver import DEFAULT_HBAR, SimulationConfig


class ConfigError(ValueError):
    pass


def _float(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse {key}={text!r} as a number") from None


def _int(key, text):
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"cannot parse {key}={text!r} as an integer") from None
    if v != int(v):
        raise ConfigError(f"{key} must be an integer, got {text!r}")
    return int(v)


def _lam(key, text):
    if text.strip().lower() in ("inf", "infinity", "coherent"):
        return math.inf
    return _float(key, text)


def _x0(key, text):
    if text.strip().lower() == "auto":
        return None
    return _float(key, text)


def _times(key, text):
    parts = [s for s in text.replace(";", ",").split(",") if s.strip()]
    return tuple(_float(key, s) for s in parts)


def _kernel_name(key, text):
    name = text.strip().lower()
    if name not in KERNEL_NAMES:
        raise ConfigError(f"{key} must be one of {', '.join(KERNEL_NAMES)}, got {text!r}")
    return name


# key -> (parser, default, help)
KEYS = {
    "E_K": (_float, 0.5, "dimensionless kinetic energy; p0 = sqrt(2 E_K)"),
    "sigma0": (_float, None, "initial momentum standard deviation (default 0.1*E_K)"),
    "tau": (_float, 3.0, "collision time"),
    "kernel": (_kernel_name, "coherent", "coherent | sech | exponential | quadratic"),
    "lambda": (_lam, math.inf, "correlation length for sech/exponential (inf = coherent)"),
    "lambda1": (_float, 0.0, "quadratic kernel: first-order coefficient"),
    "lambda2": (_float, None, "quadratic kernel: second-order coefficient (default 1/(2 lambda^2))"),
    "cutoff": (_float, None, "quadratic kernel: |eta| beyond which Delta = 0 (default: root)"),
    "hbar": (_float, DEFAULT_HBAR, "dimensionless Planck constant"),
    "barrier_width": (_float, 1.0, "Gaussian barrier width a"),
    "barrier_height": (_float, 1.0, "barrier height (0 = no potential)"),
    "x0": (_x0, None, "initial packet centre; auto = -5*max(a, position std, 10*hbar)"),
    "x_min": (_float, -160.0, "domain lower x bound"),
    "x_max": (_float, 240.0, "domain upper x bound"),
    "n_x": (_int, 2048, "number of x points (even)"),
    "p_min": (_float, -6.0, "domain lower p bound"),
    "p_max": (_float, 6.0, "domain upper p bound"),
    "n_p": (_int, 1024, "number of p points (even)"),
    "dt": (_float, 0.01, "time step"),
    "t_final": (_float, 60.0, "final time"),
    "snapshot_times": (_times, (12.0, 24.0, 36.0, 48.0, 60.0), "comma-separated snapshot times"),
    "boundary_threshold": (_float, 1e-6, "boundary-mass warning level"),
    "record_every": (_int, 1, "record moments every N steps"),
}


def describe_keys() -> str:
    lines = []
    for key, (_, default, text) in KEYS.items():
        d = ",".join(f"{t:g}" for t in default) if isinstance(default, tuple) else default
        lines.append(f"  {key:<18} {text} [default: {d}]")
    return "\n".join(lines)


def parse_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


def parse_overrides(pairs: Iterable[str]) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        k, _, v = item.partition("=")
        out[k.strip()] = v.strip()
    return out


def build_config(raw: Mapping[str, str]) -> SimulationConfig:
    """Typed config from string values; unknown keys and bad values name the key."""
    for key in raw:
        if key not in KEYS:
            raise ConfigError(f"unknown key {key}")
    vals = {key: KEYS[key][0](key, text) for key, text in raw.items()}

    def get(key):
        return vals.get(key, KEYS[key][1])

    lam = get("lambda")
    if not lam > 0:
        raise ConfigError("lambda must be positive")
    name = get("kernel")
    if name == "sech" and not math.isinf(lam):
        kernel = CorrelationKernel.sech(lam)
    elif name == "sech" or name == "coherent":
        kernel = CorrelationKernel.coherent()
    elif name == "exponential":
        if math.isinf(lam):
            raise ConfigError("lambda must be finite for the exponential kernel")
        kernel = CorrelationKernel.exponential(lam)
    else:
        lam2 = get("lambda2")
        if lam2 is None:
            if math.isinf(lam):
                raise ConfigError("lambda2 (or a finite lambda) is required for the quadratic kernel")
            lam2 = 1.0 / (2.0 * lam ** 2)
        if not lam2 > 0:
            raise ConfigError("lambda2 must be positive")
        cutoff = get("cutoff")
        if cutoff is not None and not cutoff > 0:
            raise ConfigError("cutoff must be positive")
        kernel = CorrelationKernel.quadratic(lam2, get("lambda1"), cutoff)

    for key in ("barrier_width", "hbar", "tau", "dt", "E_K", "boundary_threshold"):
        if not get(key) > 0:
            raise ConfigError(f"{key} must be positive")
    if get("barrier_height") < 0:
        raise ConfigError("barrier_height must be non-negative")
    if get("sigma0") is not None and not get("sigma0") > 0:
        raise ConfigError("sigma0 must be positive")
    if get("t_final") < 0:
        raise ConfigError("t_final must be non-negative")
    for key in ("n_x", "n_p"):
        n = get(key)
        if n < 8 or n % 2:
            raise ConfigError(f"{key} must be an even integer >= 8")
    if not get("x_min") < get("x_max"):
        raise ConfigError("x_min must be below x_max")
    if not get("p_min") < get("p_max"):
        raise ConfigError("p_min must be below p_max")
    if get("record_every") < 1:
        raise ConfigError("record_every must be positive")

    fields = dict(
        E_K=get("E_K"), sigma0=get("sigma0"), tau=get("tau"), kernel=kernel, hbar=get("hbar"),
        barrier=Barrier(get("barrier_width"), get("barrier_height")), x0=get("x0"),
        x_min=get("x_min"), x_max=get("x_max"), n_x=get("n_x"),
        p_min=get("p_min"), p_max=get("p_max"), n_p=get("n_p"),
        dt=get("dt"), t_final=get("t_final"), snapshot_times=get("snapshot_times"),
        boundary_threshold=get("boundary_threshold"), record_every=get("record_every"),
    )
    cfg = SimulationConfig(**fields)
    try:
        cfg.n_steps
    except ValueError as exc:
        raise ConfigError(f"t_final: {exc}") from None
    return cfg


def load_raw(path=None, overrides: Iterable[str] = ()) -> dict:
    """String values from a config file (UTF-8, ``#`` comments) then overrides."""
    raw = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from None
        raw.update(parse_text(text, str(path)))
    raw.update(parse_overrides(overrides))
    return raw


def parse_config(path=None, overrides: Iterable[str] = (), defaults: Mapping[str, str] | None = None) -> SimulationConfig:
    """Read a config file and apply ``key=value`` overrides.

    ``defaults`` are string values applied underneath the file, letting a
    caller (the study subcommands) shift documented defaults such as ``dt``.
    """
    raw = dict(defaults or {})
    raw.update(load_raw(path, overrides))
    return build_config(raw)


def config_to_text(cfg: SimulationConfig) -> str:
    k = cfg.kernel
    lines = [f"E_K = {cfg.E_K!r}"]
    if cfg.sigma0 is not None:
        lines.append(f"sigma0 = {cfg.sigma0!r}")
    lines += [f"tau = {cfg.tau!r}", f"kernel = {k.variant}"]
    if k.variant in ("sech", "exponential"):
        lines.append(f"lambda = {k.lam!r}")
    if k.variant == "quadratic":
        lines += [f"lambda1 = {k.lambda1!r}", f"lambda2 = {k.lambda2!r}"]
        if k.cutoff is not None:
            lines.append(f"cutoff = {k.cutoff!r}")
    lines += [
        f"hbar = {cfg.hbar!r}", f"barrier_width = {cfg.barrier.a!r}",
        f"barrier_height = {cfg.barrier.height!r}",
        f"x0 = {'auto' if cfg.x0 is None else repr(cfg.x0)}",
        f"x_min = {cfg.x_min!r}", f"x_max = {cfg.x_max!r}", f"n_x = {cfg.n_x}",
        f"p_min = {cfg.p_min!r}", f"p_max = {cfg.p_max!r}", f"n_p = {cfg.n_p}",
        f"dt = {cfg.dt!r}", f"t_final = {cfg.t_final!r}",
        "snapshot_times = " + ",".join(repr(t) for t in cfg.snapshot_times),
        f"boundary_threshold = {cfg.boundary_threshold!r}", f"record_every = {cfg.record_every}",
    ]
    return "\n".join(lines) + "\n"
