import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ibm_exit.quad import QuadratureError, locate_support, log_quad


def test_gaussian_in_log_domain():
    # int exp(-x^2 / 2) over the real line, shifted far below underflow
    res = log_quad(lambda x: -0.5 * x * x - 5000.0, -40, 40, rel_tol=1e-12, points=[0.0])
    assert res.log_value == pytest.approx(0.5 * math.log(2 * math.pi) - 5000.0, abs=1e-12)
    assert res.rel_err < 1e-12


@given(p=st.floats(0.0, 6.0))
def test_power_integrals(p):
    res = log_quad(lambda x: p * np.log(x), 0.0 + 1e-300, 1.0, rel_tol=1e-10)
    assert math.exp(res.log_value) == pytest.approx(1 / (p + 1), rel=1e-8)


def test_minus_infinity_integrand():
    assert log_quad(lambda x: np.full_like(x, -np.inf), 0, 1).log_value == -math.inf


def test_budget_exhaustion_reports_error():
    with pytest.raises(QuadratureError) as info:
        log_quad(lambda x: -0.5 * np.log(np.abs(x - 0.3)), 0, 1, rel_tol=1e-14, max_panels=8)
    assert info.value.rel_err > 1e-14


def test_locate_support_extends_to_peak():
    a, b, pts = locate_support(lambda y: -((y - 20.0) ** 2), -1.0, 1.0, step=0.5, drop=30)
    assert a < 20 - math.sqrt(30) + 0.6 and b > 20 + math.sqrt(30) - 0.6
    assert all(a < p < b for p in pts)
