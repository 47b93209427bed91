"""Numerical certification of the profile inequalities and transport lemmas.

The profile inequalities are evaluated with the closed-form profile and
closed antiderivatives of the inner integrals,

    int_0^a t^2/(1+t^2) dt        = a - arctan(a),
    int_0^a dt/(t^(2/3)+8)        = 3 a^(1/3) - 6 sqrt(2) arctan(a^(1/3)/(2 sqrt 2)),

cross-checked against adaptive quadrature in the test suite.  Where the
statement is "for some lambda > 1", the largest passing lambda in (1, 2] is
located by bisection at 1e-3 granularity and reported.

Transport checks integrate  f_s + D f + U f_y = F + int f K  along
characteristics with the nonlocal term frozen from the previous iterate and
one fixed-point resweep per step (first order in the coupling).  They are
evidence, not proof.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from . import burgers

__all__ = [
    "InequalityReport",
    "TransportProblem",
    "check_profile_inequalities",
    "integrate_transport",
    "run_max_principle_draws",
    "run_decay_check",
]

_SLACK = 1e-9


@dataclass
class InequalityReport:
    name: str
    grid: str
    min_margin: float
    lambda_found: Optional[float] = None
    worst_y: Optional[float] = None
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.min_margin >= -_SLACK

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "grid": self.grid,
            "min_margin": self.min_margin,
            "lambda_found": self.lambda_found,
            "worst_y": self.worst_y,
            "passed": self.passed,
            **self.extras,
        }


def _default_grid(y_max: float, n: int) -> np.ndarray:
    half = np.geomspace(1e-6, y_max, n // 2)
    return np.concatenate([-half[::-1], half])


def _inner_t2(a: np.ndarray) -> np.ndarray:
    """int_0^a t^2/(1+t^2) dt."""
    return a - np.arctan(a)


def _inner_pow23(a: np.ndarray) -> np.ndarray:
    """int_0^a dt/(t^(2/3)+8)."""
    u = np.cbrt(a)
    return 3.0 * u - 6.0 * math.sqrt(2.0) * np.arctan(u / (2.0 * math.sqrt(2.0)))


def _lambda_bisect(holds: Callable[[float], bool], lo: float = 1.0, hi: float = 2.0,
                   tol: float = 1e-3) -> Optional[float]:
    """Largest lambda in (lo, hi] for which the inequality holds everywhere."""
    if not holds(lo + tol):
        return None
    if holds(hi):
        return hi
    a, b = lo + tol, hi
    while b - a > tol:
        mid = 0.5 * (a + b)
        if holds(mid):
            a = mid
        else:
            b = mid
    return a


def check_profile_inequalities(y_max: float = 1000.0, n: int = 100001) -> List[InequalityReport]:
    """Evaluate the profile bound, the decay bounds, and the three kernel
    inequalities on a log-spaced grid (the third on |y| >= 3 only)."""
    if y_max < 100 or n < 10**5:
        raise ValueError("grid must reach |y| >= 100 with at least 1e5 points")
    y = _default_grid(y_max, n)
    gdesc = f"log-spaced, |y| in [1e-6, {y_max:g}], {y.size} points"
    u = burgers.eval_profile(y)
    d1 = burgers.eval_derivatives(y, 1)
    d2 = burgers.eval_derivatives(y, 2)
    u_over_y = u / y  # grid excludes 0; limit -1 handled below
    out: List[InequalityReport] = []

    # Two-sided bound on Ubar'.
    lower = -1.0 / (1.0 + 3.0 * y**2 / np.cbrt((3.0 * y**2 + 1.0) ** 2))
    m_low = d1 - lower
    m_up = -d1
    margin = np.minimum(m_low, m_up)
    i = int(np.argmin(margin))
    out.append(InequalityReport("profile_slope_bound", gdesc, float(margin[i]),
                                worst_y=float(y[i]),
                                extras={"note": "at y = 0 both sides equal -1 (margin 0)"}))

    # Decay rates: report the smallest constants over the grid and require
    # the weighted quantities to decrease beyond their interior maximum.
    for name, vals, power in (("slope_decay", np.abs(d1), 1.0 / 3.0),
                              ("curvature_decay", np.abs(d2), 5.0 / 6.0)):
        weighted = vals * (1.0 + y**2) ** power
        c_found = float(weighted.max())
        pos = y > 0
        wpos = weighted[pos]
        k = int(np.argmax(wpos))
        tail = wpos[k:]
        tail_ok = bool(np.all(np.diff(tail) <= 1e-12))
        out.append(InequalityReport(
            name, gdesc, 0.0 if tail_ok else -1.0,
            worst_y=float(y[pos][k]),
            extras={"C_found": c_found, "tail_monotone": tail_ok},
        ))

    # Kernel inequality with the (1+y^2)/y^2 weight family.
    lhs3 = y**2 / (5.0 * (1.0 + y**2)) + 16.0 * y**2 / (5.0 * (1.0 + 8.0 * y**2))
    rhs3 = 1.0 + 2.0 * d1 + (2.0 / (1.0 + y**2)) * (1.5 + u_over_y)
    margin3 = rhs3 - lhs3
    i = int(np.argmin(margin3))
    origin_margin = (1.0 - 2.0 + 2.0 * (1.5 - 1.0))  # series limit Ubar/y -> -1
    out.append(InequalityReport("weighted_damping_lower_bound", gdesc, float(margin3[i]),
                                worst_y=float(y[i]),
                                extras={"origin_margin": origin_margin}))

    ay = np.abs(y)
    inner1 = _inner_t2(ay)
    body4 = np.abs(d2) * (1.0 + y**2) / y**2 * inner1
    rhs4 = 3.0 * y**2 / (1.0 + 8.0 * y**2) + y**2 / (30.0 * (1.0 + y**2))

    lam4 = _lambda_bisect(lambda lam: bool(np.all(lam * body4 <= rhs4 + _SLACK)))
    margin4 = rhs4 - body4
    i = int(np.argmin(margin4))
    out.append(InequalityReport("kernel_bound_core_weight", gdesc, float(margin4[i]),
                                lambda_found=lam4, worst_y=float(y[i])))

    far = ay >= 3.0
    yf = y[far]
    ayf = ay[far]
    w23 = np.cbrt(ayf**2)
    inner2 = _inner_pow23(ayf)
    body7 = np.abs(d2[far]) * (w23 + 8.0) * inner2
    rhs7 = (1.0 - 1.0 / (w23 + 8.0) + 2.0 * d1[far]
            - (2.0 * w23 / (3.0 * (w23 + 8.0)))
            * (1.5 + u[far] / yf + inner2 / ayf))
    lam7 = _lambda_bisect(lambda lam: bool(np.all(lam * body7 <= rhs7 + _SLACK)))
    margin7 = rhs7 - body7
    i = int(np.argmin(margin7))
    out.append(InequalityReport("kernel_bound_far_weight", f"{gdesc}, |y| >= 3",
                                float(margin7[i]), lambda_found=lam7, worst_y=float(yf[i])))
    return out


@dataclass
class TransportProblem:
    D: Callable
    F: Callable
    U_speed: Callable
    K: Optional[Callable]
    f0: Callable
    s0: float = 0.0


def _nonlocal_term(problem: TransportProblem, y: np.ndarray, f: np.ndarray, s: float) -> np.ndarray:
    if problem.K is None:
        return np.zeros_like(f)
    # Trapezoid over the current marker positions (sorted).
    kmat = problem.K(y[:, None], s, y[None, :])
    return np.trapezoid(kmat * f[None, :], x=y, axis=1)


def integrate_transport(problem: TransportProblem, s_end: float, ds: float = 1e-2,
                        y_span: float = 30.0, n_markers: int = 801) -> dict:
    """March markers along dy/ds = U_speed with df/ds = -D f + F + (Kf).

    The nonlocal term is evaluated on the profile at the start of each step
    and refined by one fixed-point resweep (first order in the coupling);
    the local terms use RK4 stages.  Returns the final profile and the
    history of sup|f| and of the outermost-marker values.
    """
    y = np.linspace(-y_span, y_span, n_markers)
    f = np.asarray(problem.f0(y), dtype=float)
    s = problem.s0
    hist_s = [s]
    hist_sup = [float(np.max(np.abs(f)))]
    hist_tail = [float(max(abs(f[0]), abs(f[-1])))]

    def local_step(y0, f0, s0, nl):
        def rhs(yv, fv, sv):
            return problem.U_speed(yv, sv), -problem.D(yv, sv) * fv + problem.F(yv, sv) + nl

        k1y, k1f = rhs(y0, f0, s0)
        k2y, k2f = rhs(y0 + 0.5 * ds * k1y, f0 + 0.5 * ds * k1f, s0 + 0.5 * ds)
        k3y, k3f = rhs(y0 + 0.5 * ds * k2y, f0 + 0.5 * ds * k2f, s0 + 0.5 * ds)
        k4y, k4f = rhs(y0 + ds * k3y, f0 + ds * k3f, s0 + ds)
        return (y0 + ds / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y),
                f0 + ds / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f))

    n_steps = int(round((s_end - problem.s0) / ds))
    for _ in range(n_steps):
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(f))):
            raise RuntimeError("transport marchers left the finite range")
        nl0 = _nonlocal_term(problem, y, f, s)
        y1, f1 = local_step(y, f, s, nl0)
        if problem.K is not None:
            nl1 = _nonlocal_term(problem, y1, f1, s + ds)
            y1, f1 = local_step(y, f, s, 0.5 * (nl0 + nl1))
        y, f = y1, f1
        s += ds
        hist_s.append(s)
        hist_sup.append(float(np.max(np.abs(f))))
        hist_tail.append(float(max(abs(f[0]), abs(f[-1]))))
    return {"y": y, "f": f, "s": s, "sup_history": np.array(hist_sup),
            "tail_history": np.array(hist_tail), "s_history": np.array(hist_s)}


def run_max_principle_draws(seed: int = 7, n_draws: int = 20, s_end: float = 4.0,
                            ds: float = 2e-2, n_markers: int = 601) -> dict:
    """Randomized admissible coefficient draws for the nonlocal maximum principle.

    Each draw satisfies, globally in y: D >= lambda_D > 0,
    int |K| dy' <= delta * D with delta < 1, ||F|| <= F0, ||f0|| <= m0 and
    m0 lambda_D > F0 / (2 - 2 delta).  The conclusion ||f|| <= 2 m0 is
    checked along the integration.
    """
    rng = np.random.default_rng(seed)
    results = []
    for _ in range(n_draws):
        lam_d = rng.uniform(0.5, 2.0)
        delta = rng.uniform(0.1, 0.8)
        m0 = rng.uniform(0.5, 2.0)
        f0_amp = m0 * rng.uniform(0.3, 1.0)
        F0 = 0.9 * m0 * lam_d * (2.0 - 2.0 * delta)
        famp = F0 * rng.uniform(0.2, 1.0)
        width = rng.uniform(0.5, 2.0)
        kw = rng.uniform(0.5, 1.5)
        knorm = delta * lam_d / (math.sqrt(math.pi) * kw)
        ksign = rng.choice([-1.0, 1.0])

        problem = TransportProblem(
            D=lambda y, s, lam_d=lam_d: lam_d + y**2 / (1.0 + y**2),
            F=lambda y, s, famp=famp, width=width: famp * np.exp(-((y / width) ** 2)),
            U_speed=lambda y, s: burgers.eval_profile(y) + 1.5 * y,
            K=lambda y, s, yp, knorm=knorm, kw=kw, ksign=ksign:
                ksign * knorm * np.exp(-(((y - yp) / kw) ** 2)),
            f0=lambda y, f0_amp=f0_amp, width=width: f0_amp * np.cos(3.0 * y) * np.exp(-((y / (2 * width)) ** 2)),
        )
        sol = integrate_transport(problem, s_end, ds=ds, y_span=25.0, n_markers=n_markers)
        results.append({
            "m0": m0, "lambda_D": lam_d, "delta": delta, "F0": F0,
            "sup_f": float(sol["sup_history"].max()),
            "bound": 2.0 * m0,
            "passed": bool(sol["sup_history"].max() <= 2.0 * m0 + 1e-9),
        })
    return {"draws": results, "all_passed": all(r["passed"] for r in results)}


def run_decay_check(lambda_D: float = 1.0, lambda_F: float = 0.5, F0: float = 0.3,
                    tail0: float = 0.8, s_end: float = 3.0) -> dict:
    """Far-field decay estimate: with D >= lambda_D and ||F|| <= F0 e^(-lambda_F s),
    the tail obeys  limsup |f| <= tail0 e^(-lambda_D (s-s0)) + F0 e^(-lambda_F s)/(lambda_D - lambda_F)
    (case lambda_D > lambda_F), checked at the outermost resolved markers."""
    if lambda_D <= lambda_F:
        raise ValueError("this check runs the lambda_D > lambda_F branch")
    problem = TransportProblem(
        D=lambda y, s: lambda_D * np.ones_like(y),
        F=lambda y, s: F0 * math.exp(-lambda_F * s) * (y**2 / (1.0 + y**2)),
        U_speed=lambda y, s: burgers.eval_profile(y) + 1.5 * y,
        K=None,
        f0=lambda y: tail0 * y**2 / (1.0 + y**2),
    )
    sol = integrate_transport(problem, s_end, ds=1e-2, y_span=40.0, n_markers=801)
    s_hist = sol["s_history"]
    bound = tail0 * np.exp(-lambda_D * s_hist) + F0 * np.exp(-lambda_F * s_hist) / (lambda_D - lambda_F)
    ok = bool(np.all(sol["tail_history"] <= bound + 1e-6))
    return {"tail": sol["tail_history"], "bound": bound, "s": s_hist, "passed": ok}
