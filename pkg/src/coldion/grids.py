"""Uniform 1D grids, derivative stencils, and local polynomial interpolation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Grid1D", "derivative", "cubic_interp", "lagrange4_nonuniform", "trapezoid"]


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with an odd number of nodes (a center node exists)."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if self.dx <= 0:
            raise ValueError("grid spacing must be positive")
        if self.n < 3:
            raise ValueError("grid needs at least 3 nodes")
        if self.n % 2 == 0:
            raise ValueError("grid node count must be odd")

    @classmethod
    def symmetric(cls, L: float, n: int) -> "Grid1D":
        """Grid on [-L, L] with n nodes."""
        return cls(x0=-L, dx=2.0 * L / (n - 1), n=n)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def x1(self) -> float:
        return self.x0 + self.dx * (self.n - 1)

    @property
    def center_index(self) -> int:
        return (self.n - 1) // 2


def _apply_stencil(f, coeffs, offsets, scale):
    n = f.size
    out = np.zeros_like(f)
    lo = -min(offsets)
    hi = max(offsets)
    core = slice(lo, n - hi)
    for c, k in zip(coeffs, offsets):
        out[core] += c * f[lo + k: n - hi + k]
    return out * scale, lo, hi


# One-sided coefficients for the outer nodes, second-order accurate.
_EDGE = {
    1: ([-1.5, 2.0, -0.5], [0, 1, 2]),
    2: ([2.0, -5.0, 4.0, -1.0], [0, 1, 2, 3]),
    3: ([-2.5, 9.0, -12.0, 7.0, -1.5], [0, 1, 2, 3, 4]),
    4: ([3.0, -14.0, 26.0, -24.0, 11.0, -2.0], [0, 1, 2, 3, 4, 5]),
}


def derivative(f: np.ndarray, dx: float, order: int) -> np.ndarray:
    """n-th derivative of grid samples.

    Central stencils in the interior (4th-order for n = 1, 2; standard
    5-point for n = 3, 4), one-sided at the edges.
    """
    f = np.asarray(f, dtype=float)
    if order == 1:
        coeffs, offs = [1.0, -8.0, 8.0, -1.0], [-2, -1, 1, 2]
        scale = 1.0 / (12.0 * dx)
    elif order == 2:
        coeffs, offs = [-1.0, 16.0, -30.0, 16.0, -1.0], [-2, -1, 0, 1, 2]
        scale = 1.0 / (12.0 * dx * dx)
    elif order == 3:
        coeffs, offs = [-0.5, 1.0, 0.0, -1.0, 0.5], [-2, -1, 0, 1, 2]
        scale = 1.0 / dx**3
    elif order == 4:
        coeffs, offs = [1.0, -4.0, 6.0, -4.0, 1.0], [-2, -1, 0, 1, 2]
        scale = 1.0 / dx**4
    else:
        raise ValueError(f"unsupported derivative order {order}")
    out, lo, hi = _apply_stencil(f, coeffs, offs, scale)
    ec, eo = _EDGE[order]
    escale = 1.0 / dx**order
    for i in range(lo):
        out[i] = sum(c * f[i + k] for c, k in zip(ec, eo)) * escale
        out[-1 - i] = sum(c * f[-1 - i - k] for c, k in zip(ec, eo)) * escale * (-1.0) ** order
    return out


def cubic_interp(grid: Grid1D, f: np.ndarray, xq: np.ndarray) -> np.ndarray:
    """Local 4-point Lagrange interpolation on a uniform grid (vectorized).

    Query points must lie inside the grid span; raises ValueError otherwise.
    """
    xq = np.asarray(xq, dtype=float)
    if xq.size and (xq.min() < grid.x0 - 1e-12 * grid.dx or xq.max() > grid.x1 + 1e-12 * grid.dx):
        raise ValueError("interpolation query outside grid span")
    t = (xq - grid.x0) / grid.dx
    j = np.clip(np.floor(t).astype(int), 1, grid.n - 3)
    s = t - j  # in [0, 1] away from the edges
    fm1 = f[j - 1]
    f0 = f[j]
    f1 = f[j + 1]
    f2 = f[j + 2]
    w_m1 = -s * (s - 1.0) * (s - 2.0) / 6.0
    w_0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0
    w_1 = -(s + 1.0) * s * (s - 2.0) / 2.0
    w_2 = (s + 1.0) * s * (s - 1.0) / 6.0
    return w_m1 * fm1 + w_0 * f0 + w_1 * f1 + w_2 * f2


def lagrange4_nonuniform(xp: np.ndarray, fp: np.ndarray, xq: np.ndarray) -> np.ndarray:
    """4-point Lagrange interpolation on strictly increasing abscissae."""
    xq = np.asarray(xq, dtype=float)
    n = xp.size
    j = np.searchsorted(xp, xq) - 1
    j = np.clip(j, 1, n - 3)
    idx = np.stack([j - 1, j, j + 1, j + 2])
    xs = xp[idx]  # (4, m)
    fs = fp[idx]
    out = np.zeros_like(xq, dtype=float)
    for a in range(4):
        w = np.ones_like(xq, dtype=float)
        for b in range(4):
            if b == a:
                continue
            w *= (xq - xs[b]) / (xs[a] - xs[b])
        out += w * fs[a]
    return out


def trapezoid(f: np.ndarray, dx: float) -> float:
    return float(np.trapezoid(f, dx=dx))
