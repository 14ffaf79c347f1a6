"""Gaussian barrier V(x) = height * exp(-x^2/a^2) and its splitting symbol."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Barrier:
    a: float = 1.0
    # energies are in units of the barrier height; 0 switches the potential off
    height: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("barrier_width must be positive")
        if self.height < 0:
            raise ValueError("barrier height must be non-negative")

    @classmethod
    def flat(cls):
        return cls(a=1.0, height=0.0)

    @property
    def is_flat(self) -> bool:
        return self.height == 0.0

    def __call__(self, x):
        return eval_potential(self, x)


def eval_potential(barrier: Barrier, x):
    x = np.asarray(x, dtype=float)
    return barrier.height * np.exp(-(x / barrier.a) ** 2)


def delta_v(barrier: Barrier, x, eta):
    """V(x + eta/2) - V(x - eta/2); odd in eta. Broadcasts over x and eta."""
    x = np.asarray(x, dtype=float)
    eta = np.asarray(eta, dtype=float)
    return eval_potential(barrier, x + 0.5 * eta) - eval_potential(barrier, x - 0.5 * eta)
