import math

import numpy as np
import pytest
from scipy.integrate import quad

from coldion import burgers, initdata


def oracle_I(y):
    """Adaptive-quadrature oracle for I(y) with the u = v^3 substitution,
    which removes the |y'|^(-2/3) singularity entirely."""
    y = abs(y)

    def g(v):
        u = v**3
        return 3.0 * (math.exp(-abs(y - u)) + math.exp(-(y + u)))

    cusp = y ** (1.0 / 3.0)
    hi = (y + 45.0) ** (1.0 / 3.0)
    val, _ = quad(g, 0.0, hi, points=[cusp] if 0 < cusp < hi else None, limit=300)
    return (y ** (2.0 / 3.0) + 1.0) * val


@pytest.mark.parametrize("y", [0.0, 0.03, 0.5, 1.0, 2.7, 10.0, 40.0])
def test_eval_I_against_quad_oracle(y):
    assert initdata.eval_I(y, m=800) == pytest.approx(oracle_I(y), rel=2e-6)


def test_I_positive_and_finite_limits():
    ys = np.geomspace(0.01, 300.0, 40)
    vals = np.array([initdata.eval_I(y) for y in ys])
    assert np.all(vals > 0)
    # I -> 2(1 + y^(-2/3)) as |y| -> inf (Laplace limit of the convolution).
    assert initdata.eval_I(300.0) == pytest.approx(2.0 * (1 + 300.0 ** (-2 / 3)), rel=1e-3)


def test_compute_A_convergent_and_consistent():
    A, sup_I = initdata.compute_A(1e-6)
    A2, sup_I2 = initdata.compute_A(1e-7)
    assert A == pytest.approx(A2, abs=5e-6)
    assert A == pytest.approx(min(1.0 / (8 * sup_I), math.exp(-0.25) / sup_I**2), rel=1e-12)
    # sup I is attained at finite y (around y ~ 1), above the y=0 value.
    assert sup_I > initdata.eval_I(0.0) - 1e-9
    assert 5.0 < sup_I < 7.0


def test_compute_A_rejects_bad_tol():
    with pytest.raises(ValueError):
        initdata.compute_A(1e-2)


def test_canonical_center_values():
    eps = 0.05
    data = initdata.canonical_data(eps)
    assert data.u0(0.0) == pytest.approx(0.0, abs=1e-14)
    assert data.du0(0.0, 1) == pytest.approx(-1.0 / eps, rel=1e-13)
    assert data.du0(0.0, 2) == pytest.approx(0.0, abs=1e-10)
    assert data.du0(0.0, 3) == pytest.approx(6.0 * eps**-4, rel=1e-12)


def test_canonical_is_exact_rescaled_profile():
    eps = 0.08
    data = initdata.canonical_data(eps)
    x = np.linspace(-3, 3, 1001)
    lhs = eps * data.du0(x, 1) - burgers.eval_derivatives(x * eps**-1.5, 1)
    assert np.max(np.abs(lhs)) < 1e-13


def test_canonical_eps_range():
    with pytest.raises(ValueError):
        initdata.canonical_data(0.5)


def test_figure1_values_and_derivatives():
    data = initdata.figure1_data()
    assert data.u0(0.0) == pytest.approx(0.0, abs=1e-15)
    assert data.du0(0.0, 1) == pytest.approx(-2.0, rel=1e-14)
    # Global minimum of the gradient is at x = 0 (dense scan).
    x = np.linspace(-6, 6, 20001)
    assert np.min(data.du0(x, 1)) == pytest.approx(-2.0, rel=1e-9)
    assert np.all(data.rho0(x) == 1.0)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_figure1_derivatives_match_finite_differences(order):
    data = initdata.figure1_data()
    h = 1e-5
    for x0 in (-0.7, 0.11, 0.9):
        lower = data.velocity[order - 1]
        fd = (lower(x0 + h) - lower(x0 - h)) / (2 * h)
        assert fd == pytest.approx(float(data.du0(x0, order)), rel=2e-7, abs=1e-6)


class TestValidate:
    @pytest.fixture(scope="class")
    @staticmethod
    def a_const():
        return initdata.compute_A(1e-6)

    def test_canonical_margins(self, a_const):
        A, sup_I = a_const
        data = initdata.canonical_data(0.05)
        rep = initdata.validate(data, 0.05, (-20, 20), A_value=A, sup_I=sup_I)
        c = rep.conditions
        assert c["center_normalization"].passed
        assert c["profile_closeness"].passed
        # Exact ansatz: zero left side, so the margin equals the envelope
        # minimum, which vanishes as y -> 0 but never goes negative.
        assert 0.0 <= c["profile_closeness"].margin < 1e-6
        assert c["far_field_slope"].passed
        assert c["density_envelope"].passed
        assert c["density_positive"].passed
        assert c["deriv_sup_1"].passed
        assert c["deriv_sup_2"].passed
        assert c["deriv_sup_3"].passed
        # The exact rescaled profile has sup|Ubar''''| ~ 29.9, so the paper's
        # 4th-derivative bound (constant 1) cannot hold for this data.
        assert not c["deriv_sup_4"].passed
        assert c["deriv_sup_4"].margin < -25.0

    def test_density_bump_violates_envelope(self, a_const):
        A, sup_I = a_const
        data = initdata.canonical_data(0.05)
        data.density[0] = lambda x: 1.0 + 0.8 * np.exp(-np.asarray(x) ** 2)
        rep = initdata.validate(data, 0.05, (-20, 20), A_value=A, sup_I=sup_I)
        assert not rep.conditions["density_envelope"].passed
        assert rep.conditions["density_envelope"].margin < 0

    def test_figure1_documentation_example(self, a_const):
        A, sup_I = a_const
        data = initdata.figure1_data()
        rep = initdata.validate(data, 0.5, (-20, 20), A_value=A, sup_I=sup_I)
        c = rep.conditions
        # du0(0) = -2 = -1/eps holds, but d3u0(0) = 40 != 6/eps^4 = 96.
        assert not c["center_normalization"].passed
        assert c["density_envelope"].passed
        assert c["far_field_slope"].passed

    def test_domain_monotonicity_of_closeness(self, a_const):
        A, sup_I = a_const
        data = initdata.canonical_data(0.05)
        m_small = initdata.validate(data, 0.05, (-5, 5), A_value=A, sup_I=sup_I)
        m_large = initdata.validate(data, 0.05, (-40, 40), A_value=A, sup_I=sup_I)
        assert m_small.conditions["profile_closeness"].passed
        assert m_large.conditions["profile_closeness"].passed


def test_data_from_samples_roundtrip():
    x = np.linspace(-10, 10, 4001)
    ref = initdata.figure1_data()
    data = initdata.data_from_samples(x, np.ones_like(x), ref.u0(x))
    q = np.linspace(-5, 5, 101)
    assert np.max(np.abs(data.u0(q) - ref.u0(q))) < 1e-5
    assert np.max(np.abs(data.du0(q, 1) - ref.du0(q, 1))) < 1e-5
    assert data.provenance == "custom"
    assert data.eps == pytest.approx(0.5, rel=1e-6)
