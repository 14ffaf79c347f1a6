"""Correlation-damping kernels Delta(eta) and the momentum convolution f -> f_lambda."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .grid import PhaseSpaceGrid, WignerField, apply_eta_symbol, eta_symbol

KERNEL_NAMES = ("coherent", "sech", "exponential", "quadratic")


class NonDifferentiableKernelError(ValueError):
    pass


@dataclass(frozen=True)
class CorrelationKernel:
    """Damping factor applied to the density matrix in the relative coordinate.

    ``variant`` is one of ``coherent``, ``sech``, ``exponential``,
    ``quadratic``.  ``lam`` is the correlation length used by ``sech`` and
    ``exponential``.  The quadratic form ``1 + i*lambda1*eta - lambda2*eta**2``
    is set to zero for ``|eta| > cutoff`` (default: positive root of the real
    part).
    """

    variant: str = "coherent"
    lam: float = math.inf
    lambda1: float = 0.0
    lambda2: float = 0.0
    cutoff: float | None = None

    def __post_init__(self):
        if self.variant not in KERNEL_NAMES:
            raise ValueError(f"unknown kernel {self.variant!r}; expected one of {', '.join(KERNEL_NAMES)}")
        if self.variant in ("sech", "exponential") and not self.lam > 0:
            raise ValueError("lambda must be positive")
        if self.variant == "quadratic":
            if not self.lambda2 > 0:
                raise ValueError("lambda2 must be positive for the quadratic kernel")
            if self.cutoff is not None and not self.cutoff > 0:
                raise ValueError("cutoff must be positive")

    @classmethod
    def coherent(cls):
        return cls("coherent")

    @classmethod
    def sech(cls, lam):
        if math.isinf(lam):
            return cls.coherent()
        return cls("sech", lam=float(lam))

    @classmethod
    def exponential(cls, lam):
        return cls("exponential", lam=float(lam))

    @classmethod
    def quadratic(cls, lambda2, lambda1=0.0, cutoff=None):
        return cls("quadratic", lambda1=float(lambda1), lambda2=float(lambda2), cutoff=cutoff)

    @property
    def is_coherent(self) -> bool:
        return self.variant == "coherent"

    @property
    def is_real(self) -> bool:
        return self.variant != "quadratic" or self.lambda1 == 0.0

    @property
    def effective_cutoff(self) -> float:
        return self.cutoff if self.cutoff is not None else 1.0 / math.sqrt(self.lambda2)

    @property
    def label(self) -> str:
        if self.variant == "coherent":
            return "coherent"
        if self.variant == "quadratic":
            return f"quadratic(L1={self.lambda1:g},L2={self.lambda2:g})"
        return f"{self.variant}{self.lam:g}"

    @property
    def correlation_length(self) -> float:
        """Lambda as a number; inf for coherent, nan for quadratic."""
        if self.variant == "coherent":
            return math.inf
        if self.variant == "quadratic":
            return math.nan
        return self.lam

    def __call__(self, eta):
        return eval_delta(self, eta)


def eval_delta(kernel: CorrelationKernel, eta):
    """Delta(eta); real for every variant except a quadratic with lambda1 != 0."""
    eta = np.asarray(eta, dtype=float)
    v = kernel.variant
    if v == "coherent":
        out = np.ones_like(eta)
    elif v == "sech":
        # cosh overflows past |eta/lam| ~ 710; 1/inf == 0 is the right limit
        with np.errstate(over="ignore"):
            out = 1.0 / np.cosh(eta / kernel.lam)
    elif v == "exponential":
        out = np.exp(-np.abs(eta) / kernel.lam)
    else:
        out = 1.0 - kernel.lambda2 * eta ** 2
        if kernel.lambda1 != 0.0:
            out = out + 1j * kernel.lambda1 * eta
        out = np.where(np.abs(eta) > kernel.effective_cutoff, 0.0, out)
        if kernel.lambda1 == 0.0:
            out = np.maximum(out.real, 0.0)
    return out[()] if out.ndim == 0 else out


def lambda_coeffs(kernel: CorrelationKernel) -> tuple[float, float]:
    """Coefficients (Lambda1, Lambda2) of Delta = 1 + i L1 eta - L2 eta^2 + ..."""
    v = kernel.variant
    if v == "coherent":
        return 0.0, 0.0
    if v == "sech":
        return 0.0, 1.0 / (2.0 * kernel.lam ** 2)
    if v == "quadratic":
        return kernel.lambda1, kernel.lambda2
    raise NonDifferentiableKernelError(
        f"non-differentiable kernel: {kernel.label} has a cusp at eta = 0")


def convolve_with_kernel(field: WignerField, kernel: CorrelationKernel) -> WignerField:
    """f_lambda: momentum convolution of ``field`` with the transform of Delta."""
    if kernel.is_coherent:
        return field.copy()
    delta = eval_delta(kernel, field.grid.eta_rfft)
    out = apply_eta_symbol(field.values, eta_symbol(delta, field.grid), field.grid)
    return field.with_values(out)


def check_resolution(kernel: CorrelationKernel, grid: PhaseSpaceGrid, threshold: float = 1e-3) -> bool:
    """Warn when Delta falls below ``threshold`` within one eta step."""
    if kernel.is_coherent:
        return True
    d = abs(complex(eval_delta(kernel, grid.deta)))
    if d < threshold:
        warnings.warn(
            f"kernel {kernel.label} decays to {d:.2e} within one eta step "
            f"(deta={grid.deta:.4g}); refine the momentum range", RuntimeWarning, stacklevel=2)
        return False
    return True
