import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coldion import diagnostics as dg
from coldion import pressureless as pe


class TestHolder:
    def test_constant_is_zero(self):
        x = np.linspace(0, 1, 100)
        assert dg.holder_seminorm(x, np.full_like(x, 3.3), 0.5) == 0.0

    def test_linear_lipschitz(self):
        x = np.linspace(0, 1, 501)
        assert dg.holder_seminorm(x, x.copy(), 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_cube_root_attains_antisymmetric_pair(self):
        x = np.linspace(-1, 1, 4001)
        u = np.cbrt(x)
        val = dg.holder_seminorm(x, u, 1.0 / 3.0)
        assert val == pytest.approx(2.0 ** (2.0 / 3.0), rel=0.01)

    def test_two_stage_matches_brute(self):
        rng = np.random.default_rng(3)
        x = np.sort(rng.uniform(-2, 2, 1500))
        u = np.sin(3 * x) + 0.1 * rng.normal(size=x.size)
        for beta in (0.4, 1.0):
            brute = dg.holder_seminorm(x, u, beta)
            staged = dg.holder_seminorm(x, u, beta, exact_limit=300)
            assert abs(staged - brute) <= 0.01 * brute

    def test_monotone_under_restriction(self):
        x = np.linspace(-1, 1, 801)
        u = np.tanh(4 * x) + 0.3 * np.sin(9 * x)
        full = dg.holder_seminorm(x, u, 0.5)
        sub = dg.holder_seminorm(x[::4], u[::4], 0.5)
        assert sub <= full + 1e-12

    @given(lam=st.floats(0.1, 10), mu=st.floats(0.1, 10))
    @settings(max_examples=25, deadline=None)
    def test_scaling_covariance(self, lam, mu):
        x = np.linspace(0.0, 1.0, 257)
        u = np.sin(2 * np.pi * x)
        beta = 0.5
        base = dg.holder_seminorm(x, u, beta)
        assert dg.holder_seminorm(x, lam * u, beta) == pytest.approx(lam * base, rel=1e-9)
        assert dg.holder_seminorm(x / mu, u, beta) == pytest.approx(
            mu**beta * base, rel=1e-9
        )

    def test_rejects_bad_beta(self):
        x = np.linspace(0, 1, 10)
        with pytest.raises(ValueError):
            dg.holder_seminorm(x, x, 0.0)


class TestTemporalFit:
    def test_exact_power_law_recovery(self):
        t_star = 1.0
        ts = t_star - np.geomspace(1e-3, 1e-1, 40)
        vals = (t_star - ts) ** (-0.7)
        fit = dg.fit_temporal_rate(ts, vals, t_star, beta=0.6, drop_last=0)
        assert fit.exponent == pytest.approx(-0.7, abs=1e-10)
        assert fit.r2 > 1 - 1e-12

    def test_beta_third_declined(self):
        ts = np.linspace(0, 0.9, 20)
        fit = dg.fit_temporal_rate(ts, np.ones_like(ts), 1.0, beta=1.0 / 3.0)
        assert fit.status == "bounded seminorm"
        assert math.isnan(fit.exponent)

    def test_t_star_inside_range_rejected(self):
        ts = np.linspace(0, 1.0, 20)
        with pytest.raises(ValueError):
            dg.fit_temporal_rate(ts, np.ones_like(ts), 0.5, beta=0.5)

    def test_window_before_t_star(self):
        t_star = 2.0
        ts = t_star - np.geomspace(1e-4, 1.0, 60)
        vals = (t_star - ts) ** (-1.2)
        fit = dg.fit_temporal_rate(ts, vals, t_star, beta=0.9)
        assert fit.window[1] < t_star


class TestSpatialFit:
    def test_exact_form_slope(self):
        x = np.linspace(-2, 2, 40001)
        t_star, x_star = 0.5, 0.0
        t = t_star - 1e-12
        rho = 1.0 + 1.0 / ((t_star - t) + np.abs(x - x_star) ** (2.0 / 3.0))
        fit, twop = dg.fit_spatial_profile(x, rho, t, t_star, x_star)
        assert fit.exponent == pytest.approx(-2.0 / 3.0, abs=1e-6)

    def test_two_parameter_fit_recovers_offset(self):
        x = np.linspace(-2, 2, 8001)
        t_star, x_star, tau = 0.5, 0.0, 3e-3
        rho = 1.0 + 2.0 / (tau + np.abs(x - x_star) ** (2.0 / 3.0))
        fit, twop = dg.fit_spatial_profile(x, rho, t_star - tau, t_star, x_star)
        assert twop["C"] == pytest.approx(2.0, rel=1e-6)
        assert twop["offset"] == pytest.approx(tau, rel=1e-4)

    def test_pressureless_exact_slope(self):
        # The -2/3 law holds "sufficiently close" to the fold: inner cutoff
        # from dominance of the spatial term, outer from the validity of the
        # cubic expansion of the characteristic map.
        data = pe.preset("gauss")
        tau = 1e-4
        al = np.linspace(-0.5, 0.5, 200001)
        x, _, n = pe.exact_state(data, -tau, al)
        fit, _ = dg.fit_spatial_profile(x, n, -tau, 0.0, 0.0, r_outer=2e-3)
        assert fit.exponent == pytest.approx(-2.0 / 3.0, abs=0.05)

    def test_insufficient_window_raises(self):
        x = np.linspace(-1, 1, 101)
        rho = np.ones_like(x) + 0.1
        with pytest.raises(dg.InsufficientDataError):
            dg.fit_spatial_profile(x, rho, 0.499, 0.5, 0.0, dominance=1e9)


class TestTstar:
    def test_synthetic_exact(self):
        t_star = 0.7
        ts = np.linspace(0, 0.6, 30)
        fit_ts, fit = dg.estimate_tstar(ts, 1.0 / (t_star - ts))
        assert fit_ts == pytest.approx(t_star, abs=1e-12)
        assert fit.r2 > 1 - 1e-12

    def test_pressureless_run(self):
        data = pe.preset("gauss")
        al = np.linspace(-2, 2, 4001)
        ts = np.linspace(-1.0, -0.05, 25)
        gm = []
        for t in ts:
            elapsed = t + 1.0
            ux = data.dv0(al) / (1.0 + elapsed * data.dv0(al))
            gm.append(np.max(np.abs(ux)))
        t_star, fit = dg.estimate_tstar(ts, gm)
        assert t_star == pytest.approx(0.0, abs=1e-4)
        assert fit.r2 > 0.99

    def test_nonmonotone_tail_warns(self):
        ts = np.linspace(0, 0.6, 30)
        g = 1.0 / (0.7 - ts)
        g[-1] = g[-2] * 0.5  # broken tail
        t_star, fit = dg.estimate_tstar(ts[:-1], g[:-1])
        assert fit.status in ("ok", "fit on monotone suffix")

    def test_ordered_exponents_across_beta(self):
        # On one synthetic blow-up family the fitted exponents are ordered
        # by -(3 beta - 1)/2.
        t_star = 1.0
        ts = t_star - np.geomspace(1e-3, 1e-1, 30)
        fits = []
        for beta in (0.5, 0.8):
            vals = (t_star - ts) ** (-(3 * beta - 1) / 2.0)
            fits.append(dg.fit_temporal_rate(ts, vals, t_star, beta, drop_last=0))
        assert fits[0].exponent > fits[1].exponent


def test_report_serialization_roundtrip():
    fit = dg.FitResult(-0.5, 1.2, 0.999, (0.0, 1.0))
    rep = dg.BlowupReport(t_star=0.5, x_star=0.0, temporal_fits={0.5: fit},
                          spatial_fit=fit, ux_inverse_fit=fit)
    d = rep.as_dict()
    assert d["t_star"] == 0.5
    assert d["temporal_fits"]["0.5"]["exponent"] == -0.5
