import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ibm_exit import asymptotics as asy
from ibm_exit.spectral import Interval, build_basis

pos = st.floats(0.1, 10.0)
big_t = st.floats(10.0, 1e8)


def test_gaussian_laplace_is_exact():
    prob = asy.LaplaceProblem(h=lambda x: 1.0, f=lambda x: -((x - 1.0) ** 2), lam=100.0, lower=-math.inf)
    assert math.exp(asy.laplace_asymptotic(prob)) == pytest.approx(math.sqrt(math.pi / 100), rel=1e-8)
    assert asy.laplace_integral(prob) == pytest.approx(asy.laplace_asymptotic(prob), abs=1e-7)


def test_laplace_doubling_lambda():
    f = lambda x: -(x + x**-2) + 3 * 2 ** (-2 / 3)  # noqa: E731
    p1 = asy.LaplaceProblem(h=lambda x: x, f=f, lam=50.0)
    p2 = asy.LaplaceProblem(h=lambda x: x, f=f, lam=100.0)
    x0, _ = asy.locate_max(p1)
    expected = 50.0 * f(x0) + 0.5 * math.log(0.5)
    assert asy.laplace_asymptotic(p2) - asy.laplace_asymptotic(p1) == pytest.approx(expected, abs=1e-8)


def test_laplace_example_with_linear_weight():
    prob = asy.LaplaceProblem(h=lambda x: x, f=lambda x: -(x + x**-2), lam=200.0)
    ratio = math.exp(asy.laplace_integral(prob) - asy.laplace_asymptotic(prob))
    assert abs(ratio - 1) < 0.01


def test_boundary_maximum_rejected():
    prob = asy.LaplaceProblem(h=lambda x: 1.0, f=lambda x: -x, lam=10.0, bracket=(0.0, 5.0))
    with pytest.raises(asy.LaplaceError):
        asy.laplace_asymptotic(prob)


def test_minimiser_of_x_plus_xinv2():
    prob = asy.LaplaceProblem(h=lambda x: 1.0, f=lambda x: -(x + x**-2), lam=1.0)
    x0, _ = asy.locate_max(prob)
    assert x0 == pytest.approx(2 ** (1 / 3), abs=1e-7)
    assert x0 + x0**-2 == pytest.approx(3 * 2 ** (-2 / 3), abs=1e-12)


def test_x_plus_xinv2_at_200():
    ratio = math.exp(asy.integral_x_plus_xinv2(200.0) - asy.asympt_x_plus_xinv2(200.0))
    assert abs(ratio - 1) <= 0.02


def test_leading_exponent():
    assert asy.asympt_x_plus_xinv2(1e9) / 1e9 == pytest.approx(-3 * 2 ** (-2 / 3), rel=1e-6)


def test_gauss_clock_at_1e4():
    ratio = math.exp(asy.gauss_clock_integral(1, 1, 1e4) - asy.asympt_gauss_clock(1, 1, 1e4))
    assert abs(ratio - 1) <= 0.02


def test_laplace_ratios_decrease_along_geometric_grids():
    lams = [25.0 * 2**k for k in range(6)]
    dev = [abs(math.expm1(asy.integral_x_plus_xinv2(l) - asy.asympt_x_plus_xinv2(l))) for l in lams]
    assert all(b < a for a, b in zip(dev, dev[1:]))
    ts = np.geomspace(1e2, 1e7, 11)
    for power, closed in ((0, asy.asympt_gauss_clock), (1, asy.asympt_u_gauss_clock)):
        dev = [abs(math.expm1(asy.gauss_clock_integral(1, 1, t, power) - closed(1, 1, t))) for t in ts]
        assert all(b < a for a, b in zip(dev, dev[1:]))


def test_u_gauss_clock_converges_like_t_minus_third():
    # the relative correction is O(t^{-1/3}); the 2% window is only reached beyond t ~ 5e4
    ts = [1e4, 1e6, 1e8]
    dev = [math.expm1(asy.gauss_clock_integral(1, 1, t, 1) - asy.asympt_u_gauss_clock(1, 1, t)) for t in ts]
    assert dev[0] > 0.02
    assert dev[2] < 0.01
    assert dev[1] / dev[2] == pytest.approx(100 ** (1 / 3), rel=0.1)


@given(a=pos, b=pos, t=big_t)
def test_change_of_variables_identity(a, b, t):
    lam = a ** (1 / 3) * b ** (2 / 3) * t ** (1 / 3)
    scale = (a * t / b) ** (1 / 3)
    assert asy.asympt_gauss_clock(a, b, t) == pytest.approx(math.log(scale) + asy.asympt_x_plus_xinv2(lam),
                                                            abs=1e-12 * max(1.0, lam))


@given(a=pos, b=pos, t=big_t)
def test_formula_quotient(a, b, t):
    quotient = asy.asympt_u_gauss_clock(a, b, t) - asy.asympt_gauss_clock(a, b, t)
    expected = math.log(2 ** (1 / 3) * a ** (1 / 3) * b ** (-1 / 3) * t ** (1 / 3))
    assert quotient == pytest.approx(expected, abs=1e-11)


def test_u_gauss_clock_ibm_specialisation():
    lam, t = math.pi**2 / 2, 1e5
    direct = math.log(2 * math.sqrt(math.pi / 3) * math.sqrt(math.pi**2 / 2) / lam * math.sqrt(t)) - 3 * (
        math.pi**2 / 2) ** (1 / 3) * lam ** (2 / 3) * 2 ** (-2 / 3) * t ** (1 / 3)
    assert asy.asympt_u_gauss_clock(math.pi**2 / 2, lam, t) == pytest.approx(direct, abs=1e-10)


def test_envelope_constants():
    basis = build_basis(Interval(0, 1))
    c = asy.EnvelopeConstants.from_basis(basis, 0.5)
    assert c.C_z == pytest.approx((math.pi**2 / 2) * math.sqrt(2 * math.pi / 3) * (4 / math.pi) ** 2, rel=1e-14)
    assert c.C_z == pytest.approx(11.5776, abs=1e-4)
    assert c.C_lambda == pytest.approx(3.6467, abs=1e-4)
    lo, hi = asy.ibm_envelope(basis, 0.5, 1e5)
    assert math.exp(hi - lo) == pytest.approx(math.pi / 2, rel=1e-14)
    ts = np.array([1e12, 1e15])
    lo, _ = asy.ibm_envelope(basis, 0.5, ts)
    assert -lo[1] / 1e5 == pytest.approx(asy.ibm_rate(basis.lambda_1), rel=1e-4)


def test_btbm_curve_power_and_rate():
    basis = build_basis(Interval(0, 1))
    assert asy.btbm_rate(3.0) / asy.ibm_rate(3.0) == pytest.approx(2 ** (-2 / 3), rel=1e-15)
    t1, t2 = 1e6, 8e6
    exp_part = lambda t: -asy.btbm_rate(basis.lambda_1) * t ** (1 / 3)  # noqa: E731
    slope = ((asy.btbm_limit_curve(basis, 0.5, t2) - exp_part(t2)) - (asy.btbm_limit_curve(basis, 0.5, t1)
                                                                      - exp_part(t1))) / math.log(8)
    assert slope == pytest.approx(1 / 6, abs=1e-12)


def test_xi_clock_specialisations():
    lam = math.pi**2 / 2
    assert asy.xi_clock_constant(lam, 1.0) == pytest.approx(asy.btbm_rate(lam), rel=1e-12)
    assert asy.xi_clock_constant(8.0, 1.0) == pytest.approx(4 * asy.xi_clock_constant(1.0, 1.0), rel=1e-12)
    assert asy.xi_clock_exponent(1e9) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        asy.xi_clock_constant(0.0, 1.0)


@given(c=st.floats(0.01, 100.0), beta=st.floats(0.05, 20.0), k=st.floats(0.1, 10.0))
def test_xi_clock_homogeneity_in_c(c, beta, k):
    ratio = asy.xi_clock_constant(k * c, beta) / asy.xi_clock_constant(c, beta)
    assert ratio == pytest.approx(k ** (2 / (2 + beta)), rel=1e-12)


def test_parabola_constant():
    l3 = asy.parabola_l(0.5, 1.0, 3)
    assert l3 > 0
    assert asy.parabola_l(0.5, 2.0, 3) / l3 == pytest.approx(2 ** (-2 * 0.5 / 1.5), rel=1e-12)
    # n = 2 uses the order -1/2 zero pi/2
    assert asy.parabola_l(0.5, 1.0, 2) < l3
    with pytest.raises(ValueError):
        asy.parabola_l(1.5, 1.0, 3)


@given(alpha=st.floats(0.01, 0.99), A=st.floats(0.1, 10.0), n=st.integers(2, 8))
def test_parabola_l_decreasing_in_aperture(alpha, A, n):
    assert asy.parabola_l(alpha, 1.1 * A, n) < asy.parabola_l(alpha, A, n)


@given(alpha=st.floats(0.001, 0.999), l=st.floats(0.01, 100.0))
def test_parabola_ratio_identity(alpha, l):
    ibm, btbm = asy.parabola_iterated_constants(alpha, l)
    assert btbm / ibm == pytest.approx(2 ** ((2 * alpha - 2) / (3 + alpha)), rel=1e-12)


def test_parabola_ratio_special_values():
    ibm, btbm = asy.parabola_iterated_constants(0.5, 1.0)
    assert math.log2(btbm / ibm) == pytest.approx(-2 / 7, abs=1e-12)
    ibm, btbm = asy.parabola_iterated_constants(1 - 1e-9, 1.0)
    assert btbm / ibm == pytest.approx(1.0, abs=1e-8)
