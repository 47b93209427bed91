"""Stable self-similar blow-up profile of the Burgers equation.

The profile Ubar(y) is the unique real root of

    Ubar^3 + Ubar + y = 0,

with the amplitude normalization c = 1.  The map U -> U^3 + U is strictly
increasing, so the root is unique and odd in y.  Derivatives follow from
implicit differentiation and are evaluated in closed form so that they can
feed inequality checks without extra truncation error.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProfileSample",
    "eval_profile",
    "eval_derivatives",
    "sample",
    "check_asymptotics",
    "profile_table",
]

# Below this |y| the two Cardano cube-root terms nearly cancel; switch to
# bisection to keep uniform 1e-12 accuracy.
_CARDANO_SWITCH = 1e-4
_BISECT_ITERS = 80


@dataclass(frozen=True)
class ProfileSample:
    """Ubar and its first four derivatives at one similarity coordinate."""

    y: float
    u_bar: float
    d1: float
    d2: float
    d3: float
    d4: float


def _cardano(y: np.ndarray) -> np.ndarray:
    # Depressed cubic t^3 + p t + q with p = 1, q = y; the discriminant
    # q^2/4 + p^3/27 is strictly positive, so exactly one real root exists.
    # Evaluate the large-magnitude cube-root term first and recover the other
    # from A*B = -p/3 to avoid catastrophic cancellation at large |y|.
    half = 0.5 * np.abs(y)
    root = np.sqrt(half * half + 1.0 / 27.0)
    big = np.cbrt(half + root)
    u_abs = -(big - 1.0 / (3.0 * big))
    return np.where(y >= 0.0, u_abs, -u_abs)


def bisection_root(y: np.ndarray, iters: int = _BISECT_ITERS) -> np.ndarray:
    """Root of U^3 + U + y = 0 by bisection on [-|y|-2, |y|+2].

    Independent of the closed form; used as fallback near y = 0 and as an
    accuracy oracle in the tests.
    """
    y = np.asarray(y, dtype=float)
    lo = -np.abs(y) - 2.0
    hi = np.abs(y) + 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        val = mid * (mid * mid + 1.0) + y
        take_hi = val > 0.0
        hi = np.where(take_hi, mid, hi)
        lo = np.where(take_hi, lo, mid)
    return 0.5 * (lo + hi)


def eval_profile(y):
    """Ubar(y): the unique real root of U^3 + U + y = 0.

    Accepts scalars or arrays; raises ValueError on non-finite input.
    """
    arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("profile evaluation requires finite y")
    u = _cardano(arr)
    small = np.abs(arr) < _CARDANO_SWITCH
    if np.any(small):
        u = np.where(small, bisection_root(arr), u)
    if np.isscalar(y) or arr.ndim == 0:
        return float(u)
    return u


def eval_derivatives(y, order: int):
    """Ubar^(n)(y) for n in 1..4, by the closed implicit-derivative recursion.

    d1 = -1/(1 + 3 U^2)
    d2 = 6 U d1^3
    d3 = 6 d1^4 + 18 U d1^2 d2
    d4 = 42 d1^3 d2 + 36 U d1 d2^2 + 18 U d1^2 d3
    """
    if order not in (1, 2, 3, 4):
        raise ValueError(f"derivative order must be in 1..4, got {order}")
    u = np.asarray(eval_profile(y), dtype=float)
    d1 = -1.0 / (1.0 + 3.0 * u * u)
    if order == 1:
        out = d1
    else:
        d2 = 6.0 * u * d1**3
        if order == 2:
            out = d2
        else:
            d3 = 6.0 * d1**4 + 18.0 * u * d1 * d1 * d2
            if order == 3:
                out = d3
            else:
                out = 42.0 * d1**3 * d2 + 36.0 * u * d1 * d2 * d2 + 18.0 * u * d1 * d1 * d3
    if np.isscalar(y) or np.asarray(y).ndim == 0:
        return float(out)
    return out


def sample(y: float) -> ProfileSample:
    """Ubar and all four derivatives at a single point."""
    u = eval_profile(y)
    return ProfileSample(
        y=float(y),
        u_bar=u,
        d1=eval_derivatives(y, 1),
        d2=eval_derivatives(y, 2),
        d3=eval_derivatives(y, 3),
        d4=eval_derivatives(y, 4),
    )


def check_asymptotics(y_values) -> dict:
    """Deviation of y^(-1/3) Ubar from -1 and of |y^(2/3) Ubar'| from 1/3.

    The origin is excluded (the scaled quantities are undefined there).
    Returns per-point tables plus the max deviation over the sample.
    """
    y = np.asarray(y_values, dtype=float)
    y = y[y != 0.0]
    if y.size == 0:
        return {"y": y, "profile_dev": y, "slope_dev": y,
                "max_profile_dev": np.nan, "max_slope_dev": np.nan}
    u = eval_profile(y)
    d1 = eval_derivatives(y, 1)
    profile_dev = np.abs(np.cbrt(1.0 / y) * u + 1.0)
    slope_dev = np.abs(np.abs(np.cbrt(y * y) * d1) - 1.0 / 3.0)
    return {
        "y": y,
        "profile_dev": profile_dev,
        "slope_dev": slope_dev,
        "max_profile_dev": float(profile_dev.max()),
        "max_slope_dev": float(slope_dev.max()),
    }


def profile_table(ymin: float, ymax: float, n: int) -> np.ndarray:
    """Columns (y, Ubar, d1, d2, d3, d4) on a uniform grid, for the CLI."""
    y = np.linspace(ymin, ymax, n)
    cols = [y, eval_profile(y)]
    cols += [eval_derivatives(y, k) for k in (1, 2, 3, 4)]
    return np.column_stack(cols)
