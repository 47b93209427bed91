"""Grid-sampled fluid state shared by the field solver and the particle code."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grids import Grid1D

__all__ = ["FluidState"]


@dataclass
class FluidState:
    """(rho, u, phi) sampled on a grid at physical time t."""

    grid: Grid1D
    rho: np.ndarray
    u: np.ndarray
    phi: Optional[np.ndarray] = None
    t: float = 0.0
    particles: Optional[dict] = field(default=None, repr=False)

    def __post_init__(self):
        n = self.grid.n
        for name in ("rho", "u", "phi"):
            arr = getattr(self, name)
            if arr is not None and np.asarray(arr).shape != (n,):
                raise ValueError(f"{name} must have shape ({n},)")
        if np.any(np.asarray(self.rho) <= 0.0):
            raise ValueError("density must be positive everywhere")
