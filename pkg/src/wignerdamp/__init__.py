"""Wigner-equation barrier scattering with correlation damping.

Phase-space solver (Strang splitting, spectral drift and kick), correlation
kernels, moment diagnostics, independent oracles and the scripted studies.
"""
from .grid import PhaseSpaceGrid, WignerField, build_grid
from .kernels import CorrelationKernel, convolve_with_kernel, eval_delta, lambda_coeffs
from .observables import MomentRecord, density, jump_metric, moments, transmission
from .potential import Barrier, delta_v, eval_potential
from .solver import (BoundaryWarning, GridClipsPacketError, NonFiniteFieldError, RunResult,
                     SimulationConfig, SplittingSolver, initial_wigner, run)

__version__ = "0.1.0"

__all__ = [
    "PhaseSpaceGrid", "WignerField", "build_grid",
    "CorrelationKernel", "convolve_with_kernel", "eval_delta", "lambda_coeffs",
    "MomentRecord", "density", "jump_metric", "moments", "transmission",
    "Barrier", "delta_v", "eval_potential",
    "BoundaryWarning", "GridClipsPacketError", "NonFiniteFieldError", "RunResult",
    "SimulationConfig", "SplittingSolver", "initial_wigner", "run",
]
