"""Hoelder seminorms, blow-up time estimation, and rate/profile fits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import curve_fit

__all__ = [
    "FitResult",
    "BlowupReport",
    "holder_seminorm",
    "fit_temporal_rate",
    "fit_spatial_profile",
    "estimate_tstar",
    "InsufficientDataError",
]

EXACT_PAIR_LIMIT = 10_000


class InsufficientDataError(RuntimeError):
    pass


@dataclass
class FitResult:
    exponent: float
    prefactor: float
    r2: float
    window: Tuple[float, float]
    status: str = "ok"

    def as_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "r2": self.r2,
            "window": list(self.window),
            "status": self.status,
        }


def _pairs_max(x: np.ndarray, u: np.ndarray, beta: float) -> float:
    best = 0.0
    n = x.size
    for i in range(n - 1):
        dx = x[i + 1:] - x[i]
        q = np.abs(u[i + 1:] - u[i]) / dx**beta
        m = q.max() if q.size else 0.0
        if m > best:
            best = float(m)
    return best


def _block_max(x, u, beta, ib, jb) -> float:
    dx = np.abs(x[jb][None, :] - x[ib][:, None])
    np.fill_diagonal(dx, np.inf) if dx.shape[0] == dx.shape[1] else None
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.abs(u[jb][None, :] - u[ib][:, None]) / dx**beta
    q[~np.isfinite(q)] = 0.0
    return float(q.max()) if q.size else 0.0


def holder_seminorm(x, u, beta: float, exact_limit: int = EXACT_PAIR_LIMIT) -> float:
    """sup over sample pairs of |u(x) - u(x')| / |x - x'|^beta.

    Exact over all O(N^2) pairs up to exact_limit points; beyond that a
    two-stage scan runs the exact search on a coarse subsample and refines
    locally around the top-100 coarse pairs.
    """
    if not (0.0 < beta <= 1.0):
        raise ValueError("beta must lie in (0, 1]")
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.size < 3:
        raise ValueError("need at least 3 samples")
    order = np.argsort(x)
    x, u = x[order], u[order]
    keep = np.concatenate([[True], np.diff(x) > 0])
    x, u = x[keep], u[keep]
    n = x.size
    if n <= exact_limit:
        return _pairs_max(x, u, beta)

    stride = int(np.ceil(n / 2000))
    sub = np.arange(0, n, stride)
    xs, us = x[sub], u[sub]
    m = sub.size
    dx = np.abs(xs[None, :] - xs[:, None])
    iu = np.triu_indices(m, k=1)
    q = np.abs(us[None, :] - us[:, None])[iu] / dx[iu] ** beta
    best = float(q.max())
    top = np.argsort(q)[-100:]
    for flat in top:
        a, b = iu[0][flat], iu[1][flat]
        ib = np.arange(max(sub[a] - stride, 0), min(sub[a] + stride + 1, n))
        jb = np.arange(max(sub[b] - stride, 0), min(sub[b] + stride + 1, n))
        best = max(best, _block_max(x, u, beta, ib, jb))
    return best


def _linfit(xv: np.ndarray, yv: np.ndarray) -> Tuple[float, float, float]:
    """Least-squares slope, intercept, and r^2."""
    A = np.column_stack([xv, np.ones_like(xv)])
    sol, *_ = np.linalg.lstsq(A, yv, rcond=None)
    pred = A @ sol
    ss_res = float(np.sum((yv - pred) ** 2))
    ss_tot = float(np.sum((yv - yv.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(sol[0]), float(sol[1]), r2


def fit_temporal_rate(
    ts: Sequence[float],
    seminorms: Sequence[float],
    t_star: float,
    beta: float,
    drop_last: int = 3,
    decades: float = 1.0,
    min_records: int = 8,
) -> FitResult:
    """Slope of log[u]_{C^beta} against log(T* - t) over the final resolved decade.

    For beta <= 1/3 the seminorm stays bounded at blow-up; the fit is
    declined with a 'bounded seminorm' status.
    """
    ts = np.asarray(ts, dtype=float)
    vals = np.asarray(seminorms, dtype=float)
    if np.any(ts >= t_star):
        raise ValueError("t_star must lie beyond every record")
    if beta <= 1.0 / 3.0 + 1e-12:
        lo, hi = float(ts.min()), float(ts.max())
        return FitResult(math.nan, math.nan, math.nan, (lo, hi), status="bounded seminorm")
    order = np.argsort(ts)
    ts, vals = ts[order], vals[order]
    if drop_last > 0 and ts.size > drop_last + min_records:
        ts, vals = ts[:-drop_last], vals[:-drop_last]
    tau = t_star - ts
    tau_end = tau.min()
    sel = tau <= tau_end * 10.0**decades
    if sel.sum() < min_records:
        raise InsufficientDataError(
            f"only {int(sel.sum())} records inside the fit window (need {min_records})"
        )
    slope, intercept, r2 = _linfit(np.log(tau[sel]), np.log(vals[sel]))
    window = (float(ts[sel].min()), float(ts[sel].max()))
    return FitResult(exponent=slope, prefactor=math.exp(intercept), r2=r2, window=window)


def fit_spatial_profile(
    x: np.ndarray,
    rho: np.ndarray,
    t: float,
    t_star: float,
    x_star: float,
    dominance: float = 10.0,
    r_outer: Optional[float] = None,
    min_pts: int = 20,
) -> Tuple[FitResult, dict]:
    """Spatial density profile near the blow-up point.

    Fits log|rho - 1| against log|x - x*| on the window where the spatial
    term dominates, (x - x*)^(2/3) >= dominance * (T* - t); the expected
    slope is -2/3.  Also fits the full two-parameter law
    rho - 1 = C / (d + |x - x*|^(2/3)) by nonlinear least squares.
    """
    x = np.asarray(x, dtype=float)
    rho = np.asarray(rho, dtype=float)
    r = np.abs(x - x_star)
    tau = t_star - t
    if tau <= 0:
        raise ValueError("snapshot must precede t_star")
    if r_outer is None:
        r_outer = 0.25 * (x.max() - x.min())
    sel = (r ** (2.0 / 3.0) >= dominance * tau) & (r <= r_outer) & (np.abs(rho - 1.0) > 0)
    if sel.sum() < min_pts:
        raise InsufficientDataError(
            f"only {int(sel.sum())} samples in the dominated window (need {min_pts})"
        )
    slope, intercept, r2 = _linfit(np.log(r[sel]), np.log(np.abs(rho[sel] - 1.0)))
    loglog = FitResult(exponent=slope, prefactor=math.exp(intercept), r2=r2,
                       window=(float(r[sel].min()), float(r[sel].max())))

    # Two-parameter form on a wider window (the dominated one plus the core).
    wide = (r <= r_outer) & (np.abs(rho - 1.0) > 0)
    def model(rr, c, d):
        return np.log(c) - np.log(d + rr ** (2.0 / 3.0))
    try:
        p0 = (max(np.abs(rho[wide] - 1.0).max() * tau, 1e-8), tau)
        popt, _ = curve_fit(model, r[wide], np.log(np.abs(rho[wide] - 1.0)),
                            p0=p0, bounds=([1e-12, 0.0], [np.inf, np.inf]), maxfev=20000)
        pred = model(r[wide], *popt)
        data = np.log(np.abs(rho[wide] - 1.0))
        ssr = float(np.sum((data - pred) ** 2))
        sst = float(np.sum((data - data.mean()) ** 2))
        twopar = {"C": float(popt[0]), "offset": float(popt[1]),
                  "r2": 1.0 - ssr / sst if sst > 0 else 1.0}
    except RuntimeError:
        twopar = {"C": math.nan, "offset": math.nan, "r2": math.nan}
    return loglog, twopar


def estimate_tstar(ts: Sequence[float], max_ux: Sequence[float], min_records: int = 8):
    """Blow-up time from the linear law 1/||u_x||_inf ~ (T* - t).

    Fits 1/max|u_x| against t on the longest strictly-growing suffix of
    max|u_x| and returns the zero crossing plus the fit record (slope in
    prefactor, implied power -1 in exponent).
    """
    ts = np.asarray(ts, dtype=float)
    g = np.asarray(max_ux, dtype=float)
    if ts.size < min_records:
        raise InsufficientDataError(f"need at least {min_records} records")
    # Longest growing suffix.
    k = ts.size - 1
    while k > 0 and g[k] > g[k - 1]:
        k -= 1
    status = "ok" if k == 0 else "fit on monotone suffix"
    tsel, ysel = ts[k:], 1.0 / g[k:]
    if tsel.size < min_records:
        raise InsufficientDataError("monotone suffix too short")
    slope, intercept, r2 = _linfit(tsel, ysel)
    if slope >= 0:
        raise InsufficientDataError("1/max|u_x| is not decreasing")
    t_star = -intercept / slope
    fit = FitResult(exponent=-1.0, prefactor=slope, r2=r2,
                    window=(float(tsel.min()), float(tsel.max())), status=status)
    return float(t_star), fit


@dataclass
class BlowupReport:
    t_star: float
    x_star: float
    temporal_fits: Dict[float, FitResult] = field(default_factory=dict)
    spatial_fit: Optional[FitResult] = None
    spatial_fit_twoparam: Optional[dict] = None
    ux_inverse_fit: Optional[FitResult] = None
    notes: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "t_star": self.t_star,
            "x_star": self.x_star,
            "temporal_fits": {str(b): f.as_dict() for b, f in self.temporal_fits.items()},
            "spatial_fit": self.spatial_fit.as_dict() if self.spatial_fit else None,
            "spatial_fit_twoparam": self.spatial_fit_twoparam,
            "ux_inverse_fit": self.ux_inverse_fit.as_dict() if self.ux_inverse_fit else None,
            "notes": self.notes,
        }
