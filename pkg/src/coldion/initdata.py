"""Initial data construction and admissibility checks.

The canonical data realizes the self-similar ansatz exactly at the initial
time: u0(x) = eps^(1/2) Ubar(x eps^(-3/2)), rho0 = 1, so the profile
closeness condition holds with zero left side and the pointwise derivative
normalizations hold identically.  The figure-1 data is rho0 = 1,
u0 = -sech(2x) tanh(2x) with analytic derivatives.

compute_A evaluates A = min{1/(8 sup I), e^(-1/4)/(sup I)^2} with
I(y) = (y^(2/3)+1) * int exp(-|y-y'|) |y'|^(-2/3) dy', integrating the
power law exactly against a linearized kernel on every cell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from . import burgers

__all__ = [
    "InitialData",
    "AdmissibilityReport",
    "ConditionResult",
    "canonical_data",
    "figure1_data",
    "data_from_samples",
    "compute_A",
    "eval_I",
    "validate",
]


@dataclass
class InitialData:
    """Initial (rho0, u0) profiles with derivative callables.

    velocity[k] is d^k u0/dx^k for k = 0..4; density[k] analogous for
    k = 0..1.  eps is the gradient-depth parameter (1/|min u0'|).
    """

    velocity: Dict[int, Callable]
    density: Dict[int, Callable]
    eps: float
    provenance: str

    def u0(self, x):
        return self.velocity[0](np.asarray(x, dtype=float))

    def du0(self, x, order: int = 1):
        return self.velocity[order](np.asarray(x, dtype=float))

    def rho0(self, x):
        return self.density[0](np.asarray(x, dtype=float))

    def drho0(self, x):
        return self.density[1](np.asarray(x, dtype=float))


def canonical_data(eps: float) -> InitialData:
    """rho0 = 1, u0 = eps^(1/2) Ubar(x eps^(-3/2)).

    By the chain rule d^n u0(x) = eps^((1-3n)/2) Ubar^(n)(x eps^(-3/2)), so
    u0(0) = 0, u0'(0) = -1/eps, u0''(0) = 0, u0'''(0) = 6 eps^-4.
    """
    if not (0.0 < eps <= 0.2):
        raise ValueError("eps must lie in (0, 0.2]")
    scale = eps ** (-1.5)

    def make(order):
        amp = eps ** ((1 - 3 * order) / 2.0)
        if order == 0:
            return lambda x: amp * burgers.eval_profile(np.asarray(x) * scale)
        return lambda x: amp * burgers.eval_derivatives(np.asarray(x) * scale, order)

    velocity = {k: make(k) for k in range(5)}
    density = {0: lambda x: np.ones_like(np.asarray(x, dtype=float)),
               1: lambda x: np.zeros_like(np.asarray(x, dtype=float))}
    return InitialData(velocity, density, eps=eps, provenance="canonical")


def figure1_data() -> InitialData:
    """rho0 = 1, u0 = -sech(2x) tanh(2x), with closed-form derivatives."""

    def st(x):
        u = 2.0 * np.asarray(x, dtype=float)
        return 1.0 / np.cosh(u), np.tanh(u)

    def u0(x):
        s, t = st(x)
        return -s * t

    def d1(x):
        s, t = st(x)
        return -2.0 * s * (s * s - t * t)

    def d2(x):
        s, t = st(x)
        return 4.0 * s * t * (5.0 * s * s - t * t)

    def d3(x):
        s, t = st(x)
        return 8.0 * s * (5.0 * s**4 - 18.0 * s * s * t * t + t**4)

    def d4(x):
        s, t = st(x)
        return 16.0 * s * t * (-61.0 * s**4 + 58.0 * s * s * t * t - t**4)

    velocity = {0: u0, 1: d1, 2: d2, 3: d3, 4: d4}
    density = {0: lambda x: np.ones_like(np.asarray(x, dtype=float)),
               1: lambda x: np.zeros_like(np.asarray(x, dtype=float))}
    # min u0' = u0'(0) = -2, so the natural gradient depth is 1/2.
    return InitialData(velocity, density, eps=0.5, provenance="figure1")


def data_from_samples(x: np.ndarray, rho0: np.ndarray, u0: np.ndarray) -> InitialData:
    """Initial data from sampled profiles; derivatives by stencils on the sample grid."""
    from .grids import derivative

    x = np.asarray(x, dtype=float)
    dx = x[1] - x[0]
    if not np.allclose(np.diff(x), dx):
        raise ValueError("sampled initial data requires a uniform grid")
    du = {0: np.asarray(u0, float)}
    for k in range(1, 5):
        du[k] = derivative(du[0], dx, k)
    dr = {0: np.asarray(rho0, float)}
    dr[1] = derivative(dr[0], dx, 1)

    def interp(vals):
        return lambda q: np.interp(np.asarray(q, dtype=float), x, vals)

    velocity = {k: interp(v) for k, v in du.items()}
    density = {k: interp(v) for k, v in dr.items()}
    eps = 1.0 / abs(float(du[1].min())) if du[1].min() < 0 else math.inf
    return InitialData(velocity, density, eps=eps, provenance="custom")


# ---------------------------------------------------------------------------
# The localization constant A.

def _kernel_cells(y: float, m: int) -> np.ndarray:
    """Cell boundaries for the forcing integral at similarity offset y >= 0."""
    u_max = y + 45.0  # exp(-45) tail is below double rounding
    pts = [np.array([0.0]), np.geomspace(1e-8, 1.0, m)]
    n_tail = max(int(m * (u_max - 1.0) / 45.0), 8)
    pts.append(np.linspace(1.0, u_max, n_tail)[1:])
    b = np.concatenate(pts)
    if 0.0 < y < u_max:  # kernel cusp must be a breakpoint
        b = np.append(b, y)
    return np.unique(b)


def eval_I(y: float, m: int = 400) -> float:
    """I(y) = (y^(2/3)+1) * int exp(-|y-u'|) |u'|^(-2/3) du'.

    On each cell the kernel is interpolated by a parabola (endpoints and
    midpoint) and the power law integrated exactly against it, using
    int u^(-2/3) = 3 u^(1/3), int u^(1/3) = (3/4) u^(4/3),
    int u^(4/3) = (3/7) u^(7/3).  The kernel cusp at u = y is a cell
    boundary, so every cell sees a smooth kernel.
    """
    y = abs(float(y))
    b = _kernel_cells(y, m)

    def kern(u):
        return np.exp(-np.abs(y - u)) + np.exp(-(y + u))  # folds y' < 0 onto u = |y'|

    a, c = b[:-1], b[1:]
    mid = 0.5 * (a + c)
    ka, km, kc = kern(a), kern(mid), kern(c)
    h = c - a
    c1 = (-3.0 * ka + 4.0 * km - kc) / h
    c2 = 2.0 * (ka - 2.0 * km + kc) / (h * h)
    # Monomial coefficients of the parabola in u.
    a0 = ka - c1 * a + c2 * a * a
    a1 = c1 - 2.0 * c2 * a
    a2 = c2
    i0 = 3.0 * (np.cbrt(c) - np.cbrt(a))
    i1 = 0.75 * (c * np.cbrt(c) - a * np.cbrt(a))
    i2 = (3.0 / 7.0) * (c * c * np.cbrt(c) - a * a * np.cbrt(a))
    j = a0 * i0 + a1 * i1 + a2 * i2
    return (y ** (2.0 / 3.0) + 1.0) * float(j.sum())


def _sup_I(m: int) -> Tuple[float, float]:
    y_scan = np.concatenate([[0.0], np.geomspace(0.005, 60.0, 240)])
    vals = np.array([eval_I(y, m) for y in y_scan])
    i = int(np.argmax(vals))
    lo = y_scan[max(i - 1, 0)]
    hi = y_scan[min(i + 1, y_scan.size - 1)]
    fine = np.linspace(lo, hi, 60)
    fvals = np.array([eval_I(y, m) for y in fine])
    j = int(np.argmax(fvals))
    return float(fvals[j]), float(fine[j])


def compute_A(quad_tol: float = 1e-6) -> Tuple[float, float]:
    """(A, sup_I) with A = min{1/(8 sup I), e^(-1/4)/(sup I)^2}.

    The cell count is doubled until A moves by less than quad_tol.
    """
    if not (0.0 < quad_tol <= 1e-3):
        raise ValueError("quad_tol must lie in (0, 1e-3]")
    m = 200
    prev = None
    for _ in range(8):
        sup_i, _ = _sup_I(m)
        a_val = min(1.0 / (8.0 * sup_i), math.exp(-0.25) / sup_i**2)
        if prev is not None and abs(a_val - prev) < quad_tol:
            return a_val, sup_i
        prev = a_val
        m *= 2
    raise RuntimeError("A quadrature did not converge")


# ---------------------------------------------------------------------------
# Admissibility report.

@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    margin: float
    note: str = ""


@dataclass
class AdmissibilityReport:
    conditions: Dict[str, ConditionResult]
    A_value: float
    sup_I: float
    eps: float

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def as_dict(self) -> dict:
        return {
            "A": self.A_value,
            "sup_I": self.sup_I,
            "eps": self.eps,
            "conditions": {
                k: {"passed": v.passed, "margin": v.margin, "note": v.note}
                for k, v in self.conditions.items()
            },
        }


_EQ_TOL = 1e-9


def validate(
    data: InitialData,
    eps: float,
    domain: Tuple[float, float],
    n: int = 40001,
    A_value: Optional[float] = None,
    sup_I: Optional[float] = None,
) -> AdmissibilityReport:
    """Check the admissibility conditions on a dense grid; report margins.

    The far-field slope condition (a limsup at infinity) is evaluated as a
    finite-domain surrogate over |x| >= 0.9 max|domain| and labeled as such.
    """
    if A_value is None or sup_I is None:
        A_value, sup_I = compute_A(1e-6)
    a, b = domain
    half = np.geomspace(1e-6 * max(abs(a), abs(b)), max(abs(a), abs(b)), n // 2)
    x = np.unique(np.concatenate([-half[::-1], [0.0], half]))
    x = x[(x >= a) & (x <= b)]
    y = x * eps ** (-1.5)
    cond: Dict[str, ConditionResult] = {}

    # Pointwise normalizations at x = 0.
    res0 = [
        abs(float(data.u0(0.0))),
        abs(float(data.du0(0.0, 1)) + 1.0 / eps) * eps,
        abs(float(data.du0(0.0, 2))) * eps**2.5,
        abs(float(data.du0(0.0, 3)) - 6.0 * eps**-4) * eps**4,
    ]
    worst = max(res0)
    cond["center_normalization"] = ConditionResult(
        passed=worst <= _EQ_TOL,
        margin=_EQ_TOL - worst,
        note="u0(0), du0(0)+1/eps, d2u0(0), d3u0(0)-6/eps^4 scaled residuals",
    )

    # Sup bounds on the first four derivatives.
    bounds = {1: eps**-1, 2: eps**-2.5, 3: 7.0 * eps**-4, 4: eps**-5.5}
    for k, bk in bounds.items():
        sup = float(np.max(np.abs(data.du0(x, k))))
        cond[f"deriv_sup_{k}"] = ConditionResult(
            passed=sup <= bk * (1.0 + 1e-12),
            margin=(bk - sup) / bk,
            note=f"sup |d^{k} u0| = {sup:.6g} vs bound {bk:.6g}",
        )

    # Profile closeness of the rescaled gradient.
    envelope = np.minimum(
        y**2 / (40.0 * (1.0 + y**2)),
        22.0 / (25.0 * (8.0 + np.abs(y) ** (2.0 / 3.0))),
    )
    lhs = np.abs(eps * data.du0(x, 1) - burgers.eval_derivatives(y, 1))
    margin = float(np.min(envelope - lhs))
    cond["profile_closeness"] = ConditionResult(
        passed=margin >= -_EQ_TOL, margin=margin, note="rescaled-gradient envelope"
    )

    # Far-field slope surrogate.
    cut = 0.9 * max(abs(a), abs(b))
    far = np.abs(x) >= cut
    sup_far = float(np.max(np.abs(np.abs(x[far]) ** (2.0 / 3.0) * data.du0(x[far], 1))))
    cond["far_field_slope"] = ConditionResult(
        passed=sup_far <= 0.5,
        margin=0.5 - sup_far,
        note=f"finite-domain surrogate over |x| >= {cut:.3g}",
    )

    # Weighted density envelope and positivity.
    env_rho = A_value / (2.0 * (8.0 + np.abs(y) ** (2.0 / 3.0)))
    margin_rho = float(np.min(env_rho - eps * np.abs(data.rho0(x) - 1.0)))
    cond["density_envelope"] = ConditionResult(
        passed=margin_rho >= -_EQ_TOL, margin=margin_rho, note="weighted rho0-1 envelope"
    )
    rho_min = float(np.min(data.rho0(x)))
    cond["density_positive"] = ConditionResult(
        passed=rho_min > 0.0, margin=rho_min, note="inf rho0"
    )

    return AdmissibilityReport(conditions=cond, A_value=A_value, sup_I=sup_I, eps=eps)
