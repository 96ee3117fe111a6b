import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ibm_exit import asymptotics as asy
from ibm_exit.compose import (
    ExitLaw,
    QuadConfig,
    SurvivalCurve,
    btbm_tail,
    compare_tails,
    ibm_tail,
    moment_compare,
    survival_curve,
    xi_clock_tail,
)
from ibm_exit.interval_exit import eta_survival
from ibm_exit.oracles import interval_exit_moments
from ibm_exit.spectral import Disk, Interval, Rectangle, build_basis

UNIT = build_basis(Interval(0, 1))
LAW = ExitLaw(UNIT, 0.5)

# frozen from the quadrature itself (rel_tol 1e-8) and cross-checked by simulation
IBM_LOG_T1 = -5.80298
BTBM_LOG_T1 = -4.275037694652669


def test_time_zero():
    assert ibm_tail(UNIT, 0.5, 0.0) == 0.0
    assert btbm_tail(UNIT, 0.5, 0.0) == 0.0
    assert xi_clock_tail(lambda u: -u, 0.0) == 0.0


def test_reference_values():
    assert ibm_tail(UNIT, 0.5, 1.0) == pytest.approx(IBM_LOG_T1, abs=1e-5)
    assert btbm_tail(UNIT, 0.5, 1.0) == pytest.approx(BTBM_LOG_T1, abs=1e-9)


def test_exit_law_switch_is_continuous():
    t = LAW.t_switch
    for fn in (LAW.log_survival, LAW.log_density):
        assert fn(t * (1 - 1e-12)) == pytest.approx(fn(t), rel=1e-9)


def test_exit_law_density_small_time_for_boxes():
    law = ExitLaw(build_basis(Rectangle((1.0, 2.0))), (0.3, 0.7))
    t = np.linspace(0.4, 3.0, 8) * law.t_switch
    h = 1e-6 * law.t_switch
    fd = -(np.exp(law.log_survival(t + h)) - np.exp(law.log_survival(t - h))) / (2 * h)
    np.testing.assert_allclose(np.exp(law.log_density(t)), fd, rtol=1e-5, atol=1e-8)


def test_tails_nonincreasing():
    ts = np.geomspace(1e-3, 1e5, 12)
    for fn in (ibm_tail, btbm_tail):
        vals = [fn(UNIT, 0.5, t, QuadConfig(rel_tol=1e-6)) for t in ts]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[0] <= 0


def test_halving_tolerance_within_error_estimate():
    for fn, t in ((ibm_tail, 10.0), (btbm_tail, 1e3)):
        coarse = fn(UNIT, 0.5, t, QuadConfig(rel_tol=1e-6), full_output=True)
        fine = fn(UNIT, 0.5, t, QuadConfig(rel_tol=5e-7), full_output=True)
        assert abs(math.expm1(coarse.log_value - fine.log_value)) <= max(coarse.rel_err, 1e-6)


def test_delta_clock_reproduces_kernel():
    u0, t = 0.7, 0.9
    step = lambda u: np.where(np.asarray(u) < u0, 0.0, -np.inf)  # noqa: E731
    assert xi_clock_tail(step, t, points=[u0]) == pytest.approx(eta_survival(u0, u0, t), abs=1e-8)


@pytest.mark.parametrize("t", [0.05, 1.0, 30.0, 1e4])
def test_xi_clock_with_exit_time_equals_btbm(t):
    cfg = QuadConfig()
    assert xi_clock_tail(LAW.log_survival, t, cfg) == pytest.approx(btbm_tail(UNIT, 0.5, t, cfg),
                                                                    rel=10 * cfg.rel_tol, abs=10 * cfg.rel_tol)


def test_btbm_approaches_limit_curve():
    dev = [abs(math.expm1(btbm_tail(UNIT, 0.5, t) - asy.btbm_limit_curve(UNIT, 0.5, t))) for t in (1e4, 1e6)]
    assert dev[1] < dev[0] and dev[1] < 0.05


def test_ibm_inside_envelope():
    for t in (1e3, 1e5):
        lo, hi = asy.ibm_envelope(UNIT, 0.5, t)
        assert lo < ibm_tail(UNIT, 0.5, t) < hi


def test_compare_margin_positive_and_growing():
    rep = compare_tails(UNIT, 0.5, [1.0, 10.0, 100.0], QuadConfig(rel_tol=1e-6))
    assert rep.holds and min(rep.margin) > 0
    assert rep.margin[0] < rep.margin[1] < rep.margin[2]


def test_compare_at_small_time_both_near_one():
    rep = compare_tails(UNIT, 0.5, [1e-4], QuadConfig(rel_tol=1e-6))
    assert rep.log_ibm[0] > -1e-2 and rep.log_btbm[0] > -1e-2
    assert rep.margin[0] == pytest.approx(math.log(2), abs=1e-2)


def test_disk_and_offcentre_points():
    disk = build_basis(Disk(1.0))
    rep = compare_tails(disk, (0.2, -0.1), [0.5, 50.0], QuadConfig(rel_tol=1e-6))
    assert rep.holds
    rep = compare_tails(UNIT, 0.15, [0.5, 50.0], QuadConfig(rel_tol=1e-6))
    assert rep.holds


def test_moments_against_closed_forms():
    (m1_ibm, m1_btbm), (m2_ibm, m2_btbm) = moment_compare(UNIT, 0.5, [1, 2])
    e1, e2 = interval_exit_moments(0.5)
    assert m1_ibm == pytest.approx(e1**2, rel=1e-5)
    assert m1_btbm == pytest.approx(e2, rel=1e-5)
    assert m1_ibm <= 2 * m1_btbm and m2_ibm <= 2 * m2_btbm
    # Jensen
    assert m2_ibm >= m1_ibm**2 and m2_btbm >= m1_btbm**2
    with pytest.raises(ValueError):
        moment_compare(UNIT, 0.5, 0.5)


def test_survival_curve_rows_and_validation():
    curve = survival_curve("btbm", UNIT, 0.5, [1.0, 10.0, 100.0])
    rows = list(curve.rows())
    assert [r["process"] for r in rows] == ["BTBM"] * 3
    assert curve.is_monotone()
    bm = survival_curve("bm", UNIT, 0.5, [0.1, 1.0])
    assert bm.log_p[1] == pytest.approx(math.log(0.00915), abs=5e-3)
    with pytest.raises(ValueError):
        SurvivalCurve([2.0, 1.0], [0.0, -1.0], "quadrature", "IBM")
    with pytest.raises(ValueError):
        survival_curve("xyz", UNIT, 0.5, [1.0])


def test_quad_config_validation():
    with pytest.raises(ValueError):
        QuadConfig(rel_tol=0.5)
    with pytest.raises(ValueError):
        ibm_tail(UNIT, 0.5, -1.0)


@settings(max_examples=8)
@given(x=st.floats(0.05, 0.95), t=st.floats(0.05, 50.0))
def test_ibm_at_most_twice_btbm(x, t):
    cfg = QuadConfig(rel_tol=1e-6)
    assert ibm_tail(UNIT, x, t, cfg) <= math.log(2) + btbm_tail(UNIT, x, t, cfg) + 1e-5


@settings(max_examples=8)
@given(x=st.floats(0.05, 0.95), t=st.floats(0.05, 50.0))
def test_ibm_reflection_symmetric(x, t):
    cfg = QuadConfig(rel_tol=1e-7)
    assert ibm_tail(UNIT, x, t, cfg) == pytest.approx(ibm_tail(UNIT, 1 - x, t, cfg), rel=1e-6)
