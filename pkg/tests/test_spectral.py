import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from ibm_exit.oracles import bessel_j0_zero_bisection, fd_interval_eigenvalues, fd_rectangle_eigenvalues
from ibm_exit.spectral import (
    Disk,
    DomainError,
    Interval,
    Rectangle,
    SmallTimeError,
    build_basis,
    default_point,
    domain_from_json,
    ground_eigenvalue,
    parse_domain,
    series_tail_bound,
    tau_density,
    tau_log_density,
    tau_survival,
)
from ibm_exit.special import bessel_j

UNIT = build_basis(Interval(0, 1))


def test_ground_eigenvalues():
    assert UNIT.lambda_1 == pytest.approx(math.pi**2 / 2, rel=1e-15)
    assert build_basis(Rectangle((1, 1)), 1).lambda_1 == pytest.approx(math.pi**2, rel=1e-15)
    j = bessel_j0_zero_bisection()
    assert build_basis(Disk(1.0), 1).lambda_1 == pytest.approx(j * j / 2, rel=1e-12)
    for dom in (Interval(0, 2), Rectangle((1, 3)), Disk(2.0)):
        assert ground_eigenvalue(dom) == pytest.approx(build_basis(dom, 4).lambda_1, rel=1e-12)


def test_eigenvalues_against_finite_differences():
    np.testing.assert_allclose(build_basis(Interval(0, 1), 10).eigenvalues, fd_interval_eigenvalues(1, 10), rtol=1e-6)
    np.testing.assert_allclose(build_basis(Rectangle((1, 1)), 10).eigenvalues,
                               fd_rectangle_eigenvalues((1, 1), 10), rtol=1e-6)


def test_rectangle_eigenvalues_non_square():
    np.testing.assert_allclose(build_basis(Rectangle((1, 2)), 8).eigenvalues,
                               fd_rectangle_eigenvalues((1, 2), 8), rtol=1e-6)


@pytest.mark.parametrize("dom", [Interval(0, 1), Rectangle((1, 1)), Rectangle((1, 2, 0.5)), Disk(1.0)])
def test_basis_invariants(dom):
    b = build_basis(dom)
    assert np.all(np.diff(b.eigenvalues) >= 0)
    assert b.eigenvalues[0] < b.eigenvalues[1]
    assert b.weyl_constant() > 0.1 * b.lambda_1
    z = default_point(dom)
    assert b.coeff(z)[0] > 0


@given(x=st.floats(0.001, 0.999))
def test_ground_coefficient_positive(x):
    assert UNIT.coeff(x)[0] > 0


def test_interval_coefficient_closed_form():
    assert UNIT.coeff(0.5)[0] == pytest.approx(4 / math.pi, rel=1e-15)


def test_disk_coefficients_by_integration():
    b = build_basis(Disk(1.0), 3)
    for k, (_, _, j) in enumerate(b.modes):
        norm = math.sqrt(math.pi) * abs(bessel_j(1, j))
        integral = quad(lambda r: float(bessel_j(0, j * r)) * 2 * math.pi * r, 0, 1)[0] / norm
        psi0 = 1.0 / norm
        assert b.coeff((0.0, 0.0))[k] == pytest.approx(psi0 * integral, rel=1e-9)


def test_disk_angular_modes_have_zero_coefficient():
    b = build_basis(Disk(1.0), 12, angular=True)
    a = b.coeff((0.3, 0.1))
    for (m, _, _), c in zip(b.modes, a):
        if m > 0:
            assert c == 0


def test_survival_large_time_limit():
    t = 40.0
    assert tau_survival(UNIT, 0.5, t) + UNIT.lambda_1 * t == pytest.approx(math.log(4 / math.pi), abs=1e-13)


def test_survival_at_one():
    assert math.exp(tau_survival(UNIT, 0.5, 1.0)) == pytest.approx(0.00915, abs=5e-5)


def test_survival_far_tail_no_underflow():
    val = tau_survival(UNIT, 0.5, 1e6 / UNIT.lambda_1)
    assert math.isfinite(val) and val < -9e5


@given(x=st.floats(0.01, 0.99), t=st.floats(0.02, 50.0))
def test_interval_symmetry(x, t):
    assert tau_survival(UNIT, x, t) == pytest.approx(tau_survival(UNIT, 1 - x, t), rel=1e-10, abs=1e-12)


@given(x=st.floats(0.01, 0.99), t=st.floats(0.02, 20.0), c=st.floats(0.3, 4.0))
def test_brownian_scaling(x, t, c):
    big = build_basis(Interval(0, c))
    assert tau_survival(big, c * x, c * c * t) == pytest.approx(tau_survival(UNIT, x, t), rel=1e-9, abs=1e-12)


@given(t=st.floats(0.011, 30.0), h=st.floats(1e-3, 1.0))
def test_survival_nonincreasing(t, h):
    a, b = tau_survival(UNIT, 0.3, t), tau_survival(UNIT, 0.3, t + h)
    assert b <= a and a <= 0


def test_density_is_negative_derivative():
    t = np.linspace(0.05, 3.0, 25)
    h = 1e-5
    fd = -(np.exp(tau_survival(UNIT, 0.4, t + h)) - np.exp(tau_survival(UNIT, 0.4, t - h))) / (2 * h)
    np.testing.assert_allclose(tau_density(UNIT, 0.4, t), fd, rtol=1e-6)


def test_density_dominant_term_and_positivity():
    t = 20.0
    lead = UNIT.lambda_1 * math.exp(-UNIT.lambda_1 * t) * UNIT.coeff(0.5)[0]
    assert tau_density(UNIT, 0.5, t) / lead == pytest.approx(1.0, abs=1e-12)
    assert np.all(tau_density(UNIT, 0.5, np.geomspace(0.011, 100, 40)) > 0)


def test_density_integrates_to_survival():
    eps = 0.05
    mass = quad(lambda t: float(tau_density(UNIT, 0.5, t)), eps, 60, limit=200)[0]
    assert mass == pytest.approx(math.exp(tau_survival(UNIT, 0.5, eps)), rel=1e-8)


def test_small_time_refused():
    with pytest.raises(SmallTimeError):
        tau_survival(UNIT, 0.5, 1e-3)
    with pytest.raises(SmallTimeError):
        tau_log_density(UNIT, 0.5, 0.0)
    assert tau_survival(UNIT, 0.5, 0.0) == 0.0


def test_tail_bound_small_for_default_k():
    assert series_tail_bound(UNIT, 0.05 / UNIT.lambda_1) < 1e-40


def test_domain_parsing_and_validation():
    assert parse_domain("interval:0,1") == Interval(0, 1)
    assert parse_domain("rectangle:1,2") == Rectangle((1, 2))
    assert parse_domain('{"type": "disk", "radius": 2}') == Disk(2.0)
    for dom in (Interval(-1, 3), Rectangle((1, 2, 3)), Disk(0.5)):
        assert domain_from_json(dom.to_json()) == dom
    for bad in ("interval:1,0", "disk:-1", "rectangle:0,1", "triangle:1"):
        with pytest.raises(DomainError):
            parse_domain(bad)
    with pytest.raises(DomainError):
        UNIT.coeff(1.0)
    with pytest.raises(ValueError):
        build_basis(Interval(0, 1), 0)


def test_no_warning_in_regular_regime():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        tau_survival(UNIT, 0.5, np.geomspace(0.011, 10, 30))
