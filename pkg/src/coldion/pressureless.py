"""Exactly solvable pressureless Euler system, the ground-truth oracle.

Characteristics give the closed-form solution

    x = alpha + (t - t0) v0(alpha),  v = v0(alpha),
    n = n0(alpha) / (1 + (t - t0) v0'(alpha)),

valid while the Jacobian stays positive, i.e. for elapsed time below
1/|inf v0'|.  The self-similar check transforms this exact solution into
(y, s) variables and compares against the steady Burgers profile.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from . import burgers

__all__ = ["PEInitialData", "exact_state", "lifespan", "selfsim_check", "NoBlowupError"]


class NoBlowupError(RuntimeError):
    """The initial gradient is nonnegative everywhere; no finite lifespan."""


@dataclass
class PEInitialData:
    """Profiles with analytic first derivative; t0 defaults to -1."""

    n0: Callable
    v0: Callable
    dv0: Callable
    t0: float = -1.0


def preset(name: str, t0: float = -1.0) -> PEInitialData:
    """Built-in initial data: 'gauss' (-x e^{-x^2}), 'sech' (-sech(2x)tanh(2x)),
    'burgers' (the profile Ubar itself)."""
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))
    if name == "gauss":
        return PEInitialData(
            n0=one,
            v0=lambda x: -np.asarray(x) * np.exp(-np.asarray(x) ** 2),
            dv0=lambda x: (2.0 * np.asarray(x) ** 2 - 1.0) * np.exp(-np.asarray(x) ** 2),
            t0=t0,
        )
    if name == "sech":
        def v0(x):
            u = 2.0 * np.asarray(x, dtype=float)
            return -np.tanh(u) / np.cosh(u)

        def dv0(x):
            u = 2.0 * np.asarray(x, dtype=float)
            s, t = 1.0 / np.cosh(u), np.tanh(u)
            return -2.0 * s * (s * s - t * t)

        return PEInitialData(n0=one, v0=v0, dv0=dv0, t0=t0)
    if name == "burgers":
        return PEInitialData(
            n0=one,
            v0=lambda x: burgers.eval_profile(np.asarray(x, dtype=float)),
            dv0=lambda x: burgers.eval_derivatives(np.asarray(x, dtype=float), 1),
            t0=t0,
        )
    raise ValueError(f"unknown preset {name!r}")


def exact_state(data: PEInitialData, t: float, alphas) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, v, n) along the given characteristic labels at time t."""
    alphas = np.asarray(alphas, dtype=float)
    elapsed = t - data.t0
    try:
        span = lifespan(data)
    except NoBlowupError:
        span = math.inf
    if elapsed >= span:
        raise ValueError(f"time beyond the smooth lifespan ({elapsed:.6g} >= {span:.6g})")
    v = data.v0(alphas)
    w = 1.0 + elapsed * data.dv0(alphas)
    return alphas + elapsed * v, v, data.n0(alphas) / w


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f: Callable[[float], float], lo: float, hi: float, iters: int = 120) -> Tuple[float, float]:
    """Golden-section minimization on [lo, hi]; returns (argmin, min)."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        if b - a < 1e-14 * max(1.0, abs(a)):
            break
    return ((a + b) / 2.0, min(fc, fd))


def _locate_gradient_min(data: PEInitialData, scan_half_width: float, scan_n: int) -> Tuple[float, float]:
    xs = np.linspace(-scan_half_width, scan_half_width, scan_n)
    vals = data.dv0(xs)
    i = int(np.argmin(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, scan_n - 1)]
    arg, m = _golden_min(lambda x: float(data.dv0(x)), lo, hi)
    if m > vals[i]:
        arg, m = xs[i], float(vals[i])
    return arg, m


def lifespan(data: PEInitialData, scan_half_width: float = 30.0, scan_n: int = 200001) -> float:
    """Elapsed blow-up time 1/|inf v0'|.

    The infimum is located by a dense scan followed by golden-section
    refinement of the bracketing interval.
    """
    _, m = _locate_gradient_min(data, scan_half_width, scan_n)
    if m >= 0.0:
        raise NoBlowupError("dv0 >= 0 everywhere on the scan window")
    return 1.0 / abs(m)


def argmin_gradient(data: PEInitialData, scan_half_width: float = 30.0, scan_n: int = 200001) -> float:
    """Location of the gradient infimum (the fold label alpha*)."""
    arg, _ = _locate_gradient_min(data, scan_half_width, scan_n)
    return arg


def blowup_location(data: PEInitialData) -> float:
    """x* = alpha* + lifespan * v0(alpha*)."""
    a = argmin_gradient(data)
    return a + lifespan(data) * float(data.v0(a))


def _invert_map(data: PEInitialData, t: float, x_targets: np.ndarray, iters: int = 200) -> np.ndarray:
    """Solve x(alpha) = alpha + (t - t0) v0(alpha) = X for alpha (monotone pre-blow-up)."""
    elapsed = t - data.t0
    lo = np.full_like(x_targets, -80.0)
    hi = np.full_like(x_targets, 80.0)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        val = mid + elapsed * data.v0(mid) - x_targets
        hi = np.where(val > 0.0, mid, hi)
        lo = np.where(val > 0.0, lo, mid)
    return 0.5 * (lo + hi)


def selfsim_check(
    data: PEInitialData,
    s_values: Sequence[float],
    y_grid: Optional[np.ndarray] = None,
) -> dict:
    """Transform the exact solution to (y, s) variables and compare with Ubar.

    Requires the normalization of the fold at the origin: t0 = -1,
    inf v0' = v0'(0) = -1, v0''(0) = 0 (checked).  Reports, per s:
    sup |V - Ubar|, sup (y^(2/3)+1)|V_y - Ubar'|, and the two-sided range
    of (y^(2/3)+1) N over the window.
    """
    if data.t0 != -1.0:
        raise ValueError("self-similar check requires t0 = -1")
    d0 = float(data.dv0(0.0))
    if abs(d0 + 1.0) > 1e-9 or abs(lifespan(data) - 1.0) > 1e-9:
        raise ValueError("normalization requires inf v0' = v0'(0) = -1")
    if y_grid is None:
        y_grid = np.linspace(-50.0, 50.0, 4001)
    rows = []
    for s in s_values:
        t = -math.exp(-s)
        xs = y_grid * (-t) ** 1.5
        al = _invert_map(data, t, xs)
        v = data.v0(al)
        w = 1.0 + (t - data.t0) * data.dv0(al)
        n = data.n0(al) / w
        V = v / math.sqrt(-t)
        N = (-t) * n
        ubar = burgers.eval_profile(y_grid)
        dev_V = float(np.max(np.abs(V - ubar)))
        # V_y by centered differences on the y grid.
        vy = np.gradient(V, y_grid)
        wgt = np.abs(y_grid) ** (2.0 / 3.0) + 1.0
        dev_Vy = float(np.max(wgt * np.abs(vy - burgers.eval_derivatives(y_grid, 1))))
        wn = wgt * N
        rows.append(
            {"s": s, "dev_V": dev_V, "dev_Vy_weighted": dev_Vy,
             "wN_min": float(wn.min()), "wN_max": float(wn.max())}
        )
    return {
        "rows": rows,
        "max_dev_V": max(r["dev_V"] for r in rows),
        "wN_min": min(r["wN_min"] for r in rows),
        "wN_max": max(r["wN_max"] for r in rows),
    }
