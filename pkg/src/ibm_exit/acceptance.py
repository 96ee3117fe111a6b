"""Acceptance criteria as runnable checks.

Each ``criterion_*`` function returns a :class:`CriterionResult`; the
``verify`` CLI command and ``tests/test_acceptance.py`` both go through
:func:`run_criteria`.  ``quick=True`` shrinks grids and path counts for a fast
smoke run; the tolerances never change.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import asymptotics as asy
from .compose import ExitLaw, QuadConfig, btbm_tail, ibm_tail, moment_compare, xi_clock_tail
from .interval_exit import eta_asymptotic_unit, eta_survival, eta_survival_unit
from .montecarlo import SimConfig, block_rng, conditional_tail, direct_tail
from . import _kernels
from .oracles import (
    bessel_j0_zero_bisection,
    eta_survival_bruteforce,
    fd_interval_eigenvalues,
    fd_rectangle_eigenvalues,
)
from .spectral import Disk, Interval, Rectangle, build_basis

UNIT = Interval(0.0, 1.0)
SQUARE = Rectangle((1.0, 1.0))
Z = 0.5


@dataclass
class CriterionResult:
    id: str
    name: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)
    runtime: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} [{self.id}] {self.name}: {self.summary} ({self.runtime:.1f}s)"

    def to_dict(self):
        return asdict(self)


def _log_grid(lo, hi, n):
    return [float(t) for t in np.geomspace(lo, hi, n)]


def _slope(x, y):
    return float(np.polyfit(np.asarray(x), np.asarray(y), 1)[0])


def _bool(x):
    return bool(x)


# -- 1 ------------------------------------------------------------------------------


def criterion_1(quick=False):
    """Interval kernel against the brute-force series and direct simulation."""
    t0 = time.perf_counter()
    value = math.exp(eta_survival(1.0, 1.0, 1.0))
    oracle = eta_survival_bruteforce(1.0, 1.0, 1.0)
    n = 20_000 if quick else 100_000
    out = np.empty(n, dtype=np.bool_)
    _kernels.clock_stays_inside(block_rng(2024, 0), np.ones(n), np.ones(n), 1.0, 1e-4, True, out)
    p_hat = float(out.mean())
    se = math.sqrt(p_hat * (1 - p_hat) / n)
    runtime = time.perf_counter() - t0
    series_ok = abs(value - oracle) <= 1e-9
    mc_ok = abs(p_hat - value) <= 3 * se
    return CriterionResult(
        "1",
        "interval kernel",
        _bool(series_ok and mc_ok and runtime < 60),
        f"P={value:.12f} series={oracle:.12f} mc={p_hat:.5f}+-{se:.5f}",
        {"value": value, "series_oracle": oracle, "abs_err": abs(value - oracle), "mc_p": p_hat,
         "mc_se": se, "n_paths": n, "z_score": (p_hat - value) / se},
    )


# -- 2 ------------------------------------------------------------------------------


def _monotone_decreasing(values):
    return all(b < a for a, b in zip(values, values[1:]))


def criterion_2(quick=False):
    """Laplace closed forms against quadrature."""
    lams = [25.0 * 2**k for k in range(6)]
    e22 = [abs(math.exp(asy.integral_x_plus_xinv2(l) - asy.asympt_x_plus_xinv2(l)) - 1) for l in lams]
    at200 = abs(math.exp(asy.integral_x_plus_xinv2(200.0) - asy.asympt_x_plus_xinv2(200.0)) - 1)
    ts = _log_grid(1e2, 1e6, 9)
    e23 = [abs(math.exp(asy.gauss_clock_integral(1, 1, t) - asy.asympt_gauss_clock(1, 1, t)) - 1) for t in ts]
    e24 = [abs(math.exp(asy.gauss_clock_integral(1, 1, t, power=1) - asy.asympt_u_gauss_clock(1, 1, t)) - 1)
           for t in ts]
    r23 = abs(math.exp(asy.gauss_clock_integral(1, 1, 1e4) - asy.asympt_gauss_clock(1, 1, 1e4)) - 1)
    r24 = abs(math.exp(asy.gauss_clock_integral(1, 1, 1e4, power=1) - asy.asympt_u_gauss_clock(1, 1, 1e4)) - 1)
    checks = {
        "xpow_lambda200": at200 <= 0.02,
        "gauss_t1e4": r23 <= 0.02,
        "ugauss_t1e4": r24 <= 0.02,
        "xpow_monotone": _monotone_decreasing(e22),
        "gauss_monotone": _monotone_decreasing(e23),
        "ugauss_monotone": _monotone_decreasing(e24),
    }
    failed = [k for k, v in checks.items() if not v]
    return CriterionResult(
        "2",
        "Laplace closed forms",
        not failed,
        f"|ratio-1|: x+x^-2 {at200:.4f}, gauss {r23:.4f}, u-gauss {r24:.4f}"
        + (f"; failing: {', '.join(failed)}" if failed else ""),
        {"checks": checks, "lambda_grid": lams, "xpow_dev": e22, "t_grid": ts, "gauss_dev": e23, "ugauss_dev": e24},
    )


# -- 3, 4 ---------------------------------------------------------------------------


def _ibm_scaled(basis, t, cfg):
    lam = basis.lambda_1
    lp = ibm_tail(basis, Z, t, cfg)
    return lp, math.exp(lp - 0.5 * math.log(t) + asy.ibm_rate(lam) * t ** (1 / 3))


def criterion_3(quick=False):
    """Envelope of the IBM tail on [1e3, 1e6]."""
    t0 = time.perf_counter()
    basis = build_basis(UNIT)
    c = asy.EnvelopeConstants.from_basis(basis, Z)
    ts = _log_grid(1e3, 1e6, 4 if quick else 10)
    scaled = [_ibm_scaled(basis, t, QuadConfig())[1] for t in ts]
    lo, hi = 2 * c.C_z * 0.95, math.pi * c.C_z * 1.05
    inside = [lo <= s <= hi for s in scaled]
    runtime = time.perf_counter() - t0
    return CriterionResult(
        "3",
        "IBM envelope",
        _bool(all(inside) and runtime < 300),
        f"scaled/C(z) in [{min(scaled) / c.C_z:.4f}, {max(scaled) / c.C_z:.4f}], window [1.9, 3.299]",
        {"C_z": c.C_z, "t": ts, "scaled": scaled, "bounds": [lo, hi]},
    )


def criterion_4(quick=False):
    """t^{1/3} decay rate of the IBM tail."""
    basis = build_basis(UNIT)
    ts = _log_grid(1e4, 1e6, 4 if quick else 7)
    logs = [ibm_tail(basis, Z, t) for t in ts]
    slope = _slope([t ** (1 / 3) for t in ts], [-v for v in logs])
    target = asy.ibm_rate(basis.lambda_1)
    rel = slope / target - 1
    return CriterionResult(
        "4",
        "IBM exponent",
        abs(rel) <= 0.02,
        f"slope {slope:.5f} vs {target:.5f} (rel {rel:+.4f})",
        {"t": ts, "log_p": logs, "slope": slope, "target": target},
    )


# -- 5 ------------------------------------------------------------------------------


def criterion_5(quick=False):
    """BTBM limit curve."""
    basis = build_basis(UNIT)
    ts = [1e4, 1e5, 1e6]
    dev = [math.exp(btbm_tail(basis, Z, t) - asy.btbm_limit_curve(basis, Z, t)) - 1 for t in ts]
    ok = abs(dev[-1]) <= 0.05 and abs(dev[-1]) < abs(dev[0])
    return CriterionResult(
        "5",
        "BTBM limit",
        ok,
        f"ratio-1 at 1e4/1e5/1e6: {dev[0]:+.5f} {dev[1]:+.5f} {dev[2]:+.5f}",
        {"t": ts, "deviation": dev},
    )


# -- 6 ------------------------------------------------------------------------------


def criterion_6(quick=False):
    """IBM tail at most twice the BTBM tail; the moment version for p = 1, 2."""
    ts = _log_grid(1e-2, 1e6, 8 if quick else 30)
    cfg = QuadConfig()
    tol = 10 * cfg.rel_tol
    per_domain = {}
    ok = True
    for name, dom, z in (("interval", UNIT, Z), ("square", SQUARE, (0.5, 0.5))):
        basis = build_basis(dom)
        margins = [math.log(2) + btbm_tail(basis, z, t, cfg) - ibm_tail(basis, z, t, cfg) for t in ts]
        per_domain[name] = margins
        ok &= all(m >= -tol for m in margins)
    try:
        moments = moment_compare(build_basis(UNIT), Z, [1, 2])
        moments_ok = True
    except AssertionError as exc:
        moments, moments_ok = str(exc), False
    worst = min(min(m) for m in per_domain.values())
    return CriterionResult(
        "6",
        "IBM <= 2 BTBM",
        _bool(ok and moments_ok),
        f"min log-margin {worst:.4f} over {len(ts)} t x 2 domains; moments {moments}",
        {"t": ts, "margins": per_domain, "moments_p1_p2": moments},
    )


# -- 7 ------------------------------------------------------------------------------


def criterion_7(quick=False):
    """Random-interval clock with an exponential tail, and equivalence with BTBM."""
    cfg = QuadConfig()
    ts = _log_grid(1e4, 1e6, 4 if quick else 7)
    logs = [xi_clock_tail(lambda u: -u, t, cfg) for t in ts]
    slope = _slope([t ** (1 / 3) for t in ts], [-v for v in logs])
    target = asy.xi_clock_constant(1.0, 1.0)
    rel = slope / target - 1
    basis = build_basis(UNIT)
    law = ExitLaw(basis, Z)
    eq_t = [0.5, 10.0, 1e3] if quick else [0.1, 1.0, 10.0, 1e3, 1e5]
    eq_err = [abs(xi_clock_tail(law.log_survival, t, cfg) - btbm_tail(basis, Z, t, cfg)) for t in eq_t]
    eq_ok = all(e <= 10 * cfg.rel_tol * max(1.0, abs(b)) for e, b in
                zip(eq_err, [btbm_tail(basis, Z, t, cfg) for t in eq_t]))
    return CriterionResult(
        "7",
        "xi-clock rate",
        _bool(abs(rel) <= 0.05 and eq_ok),
        f"fitted {slope:.5f} vs {target:.5f} (rel {rel:+.4f}); max |xi - btbm| {max(eq_err):.2e}",
        {"t": ts, "log_p": logs, "slope": slope, "target": target, "equivalence_t": eq_t, "equivalence_err": eq_err},
    )


# -- 8 ------------------------------------------------------------------------------


def criterion_8(quick=False):
    xs = np.round(np.arange(1, 100) / 100, 2)
    dev = np.abs(np.expm1(eta_survival_unit(xs, np.full_like(xs, 5.0)) - eta_asymptotic_unit(xs, 5.0)))
    worst = float(dev.max())
    return CriterionResult("8", "kernel ground-state asymptotics", worst <= 1e-6,
                           f"max |ratio-1| = {worst:.3e} at s=5", {"max_dev": worst})


# -- 9 ------------------------------------------------------------------------------


def criterion_9(quick=False):
    lam_i = build_basis(UNIT, 10).eigenvalues
    fd_i = fd_interval_eigenvalues(1.0, 10)
    lam_s = build_basis(SQUARE, 10).eigenvalues
    fd_s = fd_rectangle_eigenvalues((1.0, 1.0), 10)
    err_i = float(np.max(np.abs(lam_i / fd_i - 1)))
    err_s = float(np.max(np.abs(lam_s / fd_s - 1)))
    j = bessel_j0_zero_bisection()
    disk_l1 = build_basis(Disk(1.0), 1).lambda_1
    err_d = abs(disk_l1 / (j * j / 2) - 1)
    return CriterionResult(
        "9",
        "spectral oracle",
        _bool(err_i <= 1e-6 and err_s <= 1e-6 and err_d <= 1e-9),
        f"interval {err_i:.1e}, square {err_s:.1e}, disk {err_d:.1e}",
        {"interval": err_i, "square": err_s, "disk": err_d, "j01_bisection": j},
    )


# -- 10 -----------------------------------------------------------------------------


def criterion_10(quick=False):
    """Direct and conditional simulation against quadrature; determinism over workers."""
    basis = build_basis(UNIT)
    n_direct = 20_000 if quick else 100_000
    n_cond = 5_000 if quick else 20_000
    rows = []
    ok = True
    for process, fn in (("ibm", ibm_tail), ("btbm", btbm_tail)):
        for t in (0.5, 1.0, 4.0):
            exact = math.exp(fn(basis, Z, t))
            d = direct_tail(process, UNIT, Z, t, SimConfig(n_paths=n_direct, seed=11))
            c = conditional_tail(process, basis, Z, t, SimConfig(n_paths=n_cond, seed=12, estimator="conditional"))
            # a zero count has zero plug-in SE; fall back to the binomial SE at the exact p
            se_d = max(d.std_err, math.sqrt(exact * (1 - exact) / n_direct))
            zd = (d.p_hat - exact) / se_d
            zc = (c.p_hat - exact) / c.std_err
            zdc = (d.p_hat - c.p_hat) / math.hypot(se_d, c.std_err)
            good = max(abs(zd), abs(zc), abs(zdc)) <= 3
            ok &= good
            rows.append({"process": process, "t": t, "quad": exact, "direct": d.p_hat, "direct_se": se_d,
                         "conditional": c.p_hat, "conditional_se": c.std_err, "z": [zd, zc, zdc]})
    det = []
    for est in ("direct", "conditional"):
        cfgs = [SimConfig(n_paths=8_000, seed=5, block_size=500, workers=w, estimator=est) for w in (1, 8)]
        if est == "direct":
            a, b = (direct_tail("ibm", UNIT, Z, 1.0, cf) for cf in cfgs)
        else:
            a, b = (conditional_tail("ibm", basis, Z, 1.0, cf) for cf in cfgs)
        det.append(a.p_hat == b.p_hat and a.std_err == b.std_err)
    ok &= all(det)
    worst = max(max(abs(v) for v in r["z"]) for r in rows)
    return CriterionResult(
        "10",
        "estimator coherence",
        _bool(ok),
        f"max |z| = {worst:.2f} over {len(rows)} cases; 1 vs 8 workers identical: {all(det)}",
        {"rows": rows, "deterministic": det},
    )


# -- corollary properties ------------------------------------------------------------


def criterion_corollaries(quick=False):
    errs = []
    for alpha in (0.1, 0.25, 0.5, 0.75, 0.9):
        ibm, btbm = asy.parabola_iterated_constants(alpha, 1.7)
        errs.append(abs(btbm / ibm / 2 ** ((2 * alpha - 2) / (3 + alpha)) - 1))
    lam = math.pi**2 / 2
    errs.append(abs(asy.xi_clock_constant(lam, 1.0) / asy.btbm_rate(lam) - 1))
    errs.append(abs(asy.xi_clock_constant(8.0, 1.0) / asy.xi_clock_constant(1.0, 1.0) - 4))
    errs.append(abs(asy.xi_clock_constant(1.0, 1.0) / (1.5 * 2 ** (-2 / 3) * math.pi ** (2 / 3)) - 1))
    worst = max(errs)
    return CriterionResult("C", "corollary identities", worst <= 1e-12, f"max error {worst:.1e}", {"errors": errs})


CRITERIA = {
    "1": criterion_1,
    "2": criterion_2,
    "3": criterion_3,
    "4": criterion_4,
    "5": criterion_5,
    "6": criterion_6,
    "7": criterion_7,
    "8": criterion_8,
    "9": criterion_9,
    "10": criterion_10,
    "C": criterion_corollaries,
}


def run_criterion(key: str, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        res = CRITERIA[key](quick=quick)
    except Exception as exc:  # a crash is a failed criterion, reported with its payload
        res = CriterionResult(key, CRITERIA[key].__name__, False, f"error: {type(exc).__name__}: {exc}")
    res.runtime = time.perf_counter() - t0
    return res


def run_criteria(keys=None, quick: bool = False, echo=None):
    results = []
    for key in keys or CRITERIA:
        res = run_criterion(key, quick)
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results
