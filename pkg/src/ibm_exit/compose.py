"""Exit-time tails of iterated processes by log-domain quadrature.

With ``f`` the density of the Brownian exit time of ``D`` started at ``z``
and ``eta`` the exit time of the inner clock from an interval,

    IBM:      P_z[tau_D(Z) > t]  = int int P_0[eta_(-u,v) > t] f(u) f(v) du dv
    BTBM:     P_z[tau_D(Z1) > t] = int P_0[eta_(-u,u) > t] f(u) du
    xi-clock: P[eta_(-xi,xi) > t] = int (d/du P_0[eta_(-u,u) > t]) P[xi > u] du

The double integral is taken in ``w = u + v``, ``x = u / w`` coordinates, in
which the inner factor is ``P_x[eta_(0,1) > t / w**2]``; the outer variable
is ``log w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import erf, logsumexp

from . import interval_exit as ie
from .quad import LogQuadResult, QuadratureError, locate_support, log_quad
from .spectral import (
    SMALL_TIME,
    Disk,
    Interval,
    Rectangle,
    SpectralBasis,
    _as_point,
    tau_log_density,
    tau_survival,
)

__all__ = [
    "QuadConfig",
    "SurvivalCurve",
    "ExitLaw",
    "ibm_tail",
    "btbm_tail",
    "xi_clock_tail",
    "compare_tails",
    "moment_compare",
    "survival_curve",
    "QuadratureError",
]


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-8
    # log-space half-width, in units of the peak scale, of the first support scan
    scan_width: float = 6.0
    # the retained support carries all but exp(-drop) of the peak integrand
    drop: float = 60.0
    grid: str = "gk15-adaptive"
    log_domain: bool = True
    max_panels: int = 4000

    def __post_init__(self):
        if not 0 < self.rel_tol < 1e-2:
            raise ValueError(f"rel_tol must lie in (0, 1e-2), got {self.rel_tol}")

    @property
    def inner_tol(self) -> float:
        return 0.1 * self.rel_tol


SERIES_DROP = 40.0


class ExitLaw:
    """Exit-time law of Brownian motion from ``basis.domain`` started at ``z``.

    The eigen-series of ``basis`` is used for ``t * lambda_1 >= SMALL_TIME``
    and ``t (lambda_K - lambda_1) >= 40``.
    Below that, intervals and boxes use the exact one-dimensional kernel (a
    box is a product of intervals); the disk falls back to the half-plane law
    at the distance to the boundary, whose error is of the order of the
    (already negligible) small-time exit mass.
    """

    def __init__(self, basis: SpectralBasis, z):
        self.basis = basis
        self.z = z
        self.domain = basis.domain
        if not self.domain.contains(z):
            raise ValueError(f"z={z!r} is not inside {self.domain}")
        # the series is used only once the dropped modes are below exp(-SERIES_DROP) of
        # the ground state; the factor keeps t_switch * lambda_1 from rounding below SMALL_TIME
        lam = basis.eigenvalues
        gap = lam[-1] - lam[0] if basis.K > 1 else lam[0]
        self.t_switch = max(SMALL_TIME / lam[0], SERIES_DROP / gap) * (1.0 + 1e-12)
        dom = self.domain
        if isinstance(dom, Interval):
            zz = float(_as_point(z, 1)[0])
            self._widths = np.array([dom.length])
            self._xrel = np.array([(zz - dom.a) / dom.length])
        elif isinstance(dom, Rectangle):
            zz = _as_point(z, dom.dim)
            self._widths = np.array(dom.sides)
            self._xrel = zz / self._widths
        else:
            self._dist = dom.radius - math.hypot(*_as_point(z, 2))

    def _small_log_survival(self, t):
        if isinstance(self.domain, Disk):
            with np.errstate(divide="ignore"):
                return np.log(erf(self._dist / np.sqrt(2.0 * t)))
        out = np.zeros_like(t)
        for w, x in zip(self._widths, self._xrel):
            out = out + ie.eta_survival_unit(np.full_like(t, x), t / w**2)
        return out

    def _small_log_density(self, t):
        if isinstance(self.domain, Disk):
            d = self._dist
            return math.log(d) - 0.5 * math.log(2 * math.pi) - 1.5 * np.log(t) - d * d / (2 * t)
        surv = []
        dens = []
        for w, x in zip(self._widths, self._xrel):
            surv.append(ie.eta_survival_unit(np.full_like(t, x), t / w**2))
            dens.append(ie.eta_log_density_unit(np.full_like(t, x), t / w**2) - 2 * math.log(w))
        surv = np.array(surv)
        dens = np.array(dens)
        total_surv = surv.sum(axis=0)
        # f = S * sum_i f_i / S_i
        return total_surv + logsumexp(dens - surv, axis=0)

    def _split(self, t, small, large, at_zero):
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.full_like(t, at_zero)
        lo = (t > 0) & (t < self.t_switch)
        hi = t >= self.t_switch
        if np.any(lo):
            out[lo] = small(t[lo])
        if np.any(hi):
            out[hi] = large(t[hi])
        return float(out[0]) if scalar else out

    def log_survival(self, t):
        return self._split(
            t, self._small_log_survival, lambda tt: tau_survival(self.basis, self.z, tt), 0.0
        )

    def log_density(self, t):
        return self._split(
            t, self._small_log_density, lambda tt: tau_log_density(self.basis, self.z, tt), -np.inf
        )


def _tail_scale(lambda_1: float, t: float) -> float:
    # location of the w-peak: the saddle of exp(-pi^2 t / (2 w^2) - lambda_1 w) for large t,
    # otherwise the typical exit time
    return max((math.pi**2 * t / lambda_1) ** (1 / 3), 1.0 / lambda_1, math.sqrt(t))


def _check_t(t):
    if not (t >= 0 and math.isfinite(t)):
        raise ValueError(f"t must be a finite nonnegative number, got {t}")


def _ibm_inner(law: ExitLaw, t: float, w: float, tol: float) -> float:
    """log int_0^{1/2} P_x[eta_(0,1) > t/w^2] f(x w) f((1-x) w) dx."""
    s = t / (w * w)

    def g(x):
        x = np.asarray(x)
        ld = law.log_density(np.concatenate([x * w, (1.0 - x) * w]))
        n = len(x)
        return ie.eta_survival_unit(x, np.full_like(x, s)) + ld[:n] + ld[n:]

    # the kernel has a boundary layer of width ~ sqrt(s) at x = 0
    layer = min(0.25, math.sqrt(s)) if s > 0 else 0.25
    pts = sorted({0.5 * layer, layer, 0.25})
    res = log_quad(g, 0.0, 0.5, rel_tol=tol, points=pts)
    return res.log_value


def ibm_tail(basis: SpectralBasis, z, t: float, cfg: QuadConfig = QuadConfig(), full_output=False):
    """log P_z[tau_D(Z) > t] for iterated Brownian motion.

    With ``full_output`` a :class:`~ibm_exit.quad.LogQuadResult` carrying the
    estimated relative error is returned instead of the bare log-probability.
    """
    _check_t(t)
    if t == 0:
        res = LogQuadResult(0.0, 0.0, 0)
        return res if full_output else 0.0
    law = ExitLaw(basis, z)
    tol = cfg.inner_tol

    def outer(y):
        y = np.atleast_1d(y)
        vals = np.empty_like(y)
        for i, yi in enumerate(y):
            w = math.exp(yi)
            # symmetric in x <-> 1 - x: integrate over (0, 1/2) and double; dw w = e^{2y} dy
            vals[i] = math.log(2.0) + 2.0 * yi + _ibm_inner(law, t, w, tol)
        return vals

    res = _outer_integral(outer, math.log(_tail_scale(basis.lambda_1, t)), cfg)
    return res if full_output else res.log_value


def _outer_integral(log_g, y_center, cfg: QuadConfig, step=0.25) -> LogQuadResult:
    a, b, pts = locate_support(log_g, y_center - cfg.scan_width * 0.5, y_center + cfg.scan_width * 0.5,
                               step=step, drop=cfg.drop)
    return log_quad(log_g, a, b, rel_tol=cfg.rel_tol, points=pts, max_panels=cfg.max_panels)


def btbm_tail(basis: SpectralBasis, z, t: float, cfg: QuadConfig = QuadConfig(), full_output=False):
    """log P_z[tau_D(Z1) > t] for Brownian-time Brownian motion."""
    _check_t(t)
    if t == 0:
        res = LogQuadResult(0.0, 0.0, 0)
        return res if full_output else 0.0
    law = ExitLaw(basis, z)

    def g(y):
        u = np.exp(y)
        return y + ie.eta_survival_unit(np.full_like(u, 0.5), t / (4 * u * u)) + law.log_density(u)

    res = _outer_integral(g, math.log(_tail_scale(basis.lambda_1, t)), cfg, step=0.1)
    return res if full_output else res.log_value


def xi_clock_tail(
    xi_log_tail: Callable[[np.ndarray], np.ndarray],
    t: float,
    cfg: QuadConfig = QuadConfig(),
    points: Sequence[float] | None = None,
    full_output=False,
):
    """log P[eta_(-xi, xi) > t] for a clock ``xi`` independent of the inner motion.

    ``xi_log_tail`` maps an array of ``u`` to ``log P[xi > u]`` (nonincreasing,
    tending to -inf).  ``points`` are optional breakpoints in ``u``, useful
    when the tail has jumps.
    """
    _check_t(t)
    if t == 0:
        res = LogQuadResult(0.0, 0.0, 0)
        return res if full_output else 0.0

    def g(y):
        u = np.exp(y)
        with np.errstate(divide="ignore"):
            return y + ie.log_eta_symmetric_derivative(u, np.full_like(u, t)) + np.asarray(
                xi_log_tail(u), dtype=float
            )

    # coarse global scan: the clock law is arbitrary, so no saddle guess is available
    ys = np.arange(math.log(1e-8) + 0.5 * math.log1p(t), math.log(1e8) + math.log1p(t), 0.25)
    vals = g(ys)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    peak = float(np.max(vals))
    if peak == -math.inf:
        res = LogQuadResult(-math.inf, 0.0, 0)
        return res if full_output else -math.inf
    keep = np.nonzero(vals > peak - cfg.drop)[0]
    i0, i1 = max(int(keep[0]) - 1, 0), min(int(keep[-1]) + 1, len(ys) - 1)
    pts = [float(y) for y in ys[i0:i1 + 1]]
    if points:
        pts += [math.log(p) for p in points if p > 0]
    res = log_quad(g, float(ys[i0]), float(ys[i1]), rel_tol=cfg.rel_tol, points=pts,
                   max_panels=cfg.max_panels)
    return res if full_output else res.log_value


# -- comparisons --------------------------------------------------------------------


@dataclass
class ComparisonReport:
    t: list
    log_ibm: list
    log_btbm: list
    margin: list  # log 2 + log btbm - log ibm
    holds: bool
    tolerance: float

    def to_dict(self):
        return {
            "t": self.t,
            "log_ibm": self.log_ibm,
            "log_btbm": self.log_btbm,
            "margin": self.margin,
            "holds": self.holds,
            "tolerance": self.tolerance,
        }


def compare_tails(basis, z, t_grid, cfg: QuadConfig = QuadConfig()) -> ComparisonReport:
    """Check log IBM tail <= log 2 + log BTBM tail on ``t_grid``."""
    ts = [float(t) for t in t_grid]
    li = [ibm_tail(basis, z, t, cfg) for t in ts]
    lb = [btbm_tail(basis, z, t, cfg) for t in ts]
    margin = [math.log(2.0) + b - a for a, b in zip(li, lb)]
    tol = 10 * cfg.rel_tol
    return ComparisonReport(ts, li, lb, margin, all(m >= -tol for m in margin), tol)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)
_MOMENT_PANEL = 2.5
_MOMENT_DROP = 35.0


def _moments(log_tail: Callable[[float], float], powers: Sequence[float], t_lo: float) -> list:
    """E[tau^p] = int p t^{p-1} P[tau > t] dt for each p, integrated in log t.

    Composite 10-point Gauss-Legendre panels of width 2.5 in ``y = log t`` are
    added to the right of ``log t_lo`` until every power's integrand has
    dropped by exp(-35) below its peak.  The piece on (0, t_lo) is taken with
    P = 1, i.e. ``t_lo**p``; ``t_lo`` should be small enough for that to be
    exact to the accuracy wanted.  Tail values are shared across powers.
    """
    powers = [float(p) for p in powers]
    log_parts = [[p * math.log(t_lo)] for p in powers]
    peak = [lp[0] for lp in log_parts]
    y0 = math.log(t_lo)
    for _ in range(200):
        ys = y0 + 0.5 * _MOMENT_PANEL * (_GL_X + 1.0)
        lt = np.array([log_tail(math.exp(y)) for y in ys])
        done = True
        for i, p in enumerate(powers):
            lg = math.log(p) + p * ys + lt
            top = float(lg.max())
            peak[i] = max(peak[i], top)
            log_parts[i].append(math.log(0.5 * _MOMENT_PANEL) + float(logsumexp(lg, b=_GL_W)))
            if top > peak[i] - _MOMENT_DROP or lg[-1] > lg[0]:
                done = False
        if done:
            break
        y0 += _MOMENT_PANEL
    else:
        raise QuadratureError("moment integrand did not decay", float("nan"), float("nan"))
    return [math.exp(float(logsumexp(parts))) for parts in log_parts]


def moment_compare(basis, z, p, cfg: QuadConfig = QuadConfig(rel_tol=1e-6)):
    """Return ``(E[tau_D(Z)^p], E[tau_D(Z1)^p])`` and check the factor-2 bound.

    ``p`` may also be a sequence of powers, in which case a list of pairs is
    returned and the tails are evaluated once for all of them.
    """
    many = np.ndim(p) > 0
    powers = list(np.atleast_1d(p))
    if any(q < 1 for q in powers):
        raise ValueError("p must be >= 1")
    # P[tau(Z) <= t] is O(t) there, so replacing P by 1 costs O(t_lo**(p+1))
    t_lo = 1e-3 / basis.lambda_1
    m_ibm = _moments(lambda t: ibm_tail(basis, z, t, cfg), powers, t_lo)
    m_btbm = _moments(lambda t: btbm_tail(basis, z, t, cfg), powers, t_lo)
    for q, a, b in zip(powers, m_ibm, m_btbm):
        if a > 2 * b * (1 + 10 * cfg.rel_tol):
            raise AssertionError(f"moment inequality violated at p={q}: {a} > 2 * {b}")
    pairs = list(zip(m_ibm, m_btbm))
    return pairs if many else pairs[0]


# -- curves -------------------------------------------------------------------------


@dataclass
class SurvivalCurve:
    t_grid: np.ndarray
    log_p: np.ndarray
    method: str
    process: str
    err_est: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        self.log_p = np.asarray(self.log_p, dtype=float)
        if self.err_est is None:
            self.err_est = np.zeros_like(self.log_p)
        if np.any(np.diff(self.t_grid) <= 0):
            raise ValueError("t_grid must be strictly ascending")
        if not np.all(np.isfinite(self.log_p)):
            raise ValueError("log_p entries must be finite")

    def is_monotone(self, slack: float = 0.0) -> bool:
        return bool(np.all(np.diff(self.log_p) <= slack))

    def rows(self):
        for t, lp, e in zip(self.t_grid, self.log_p, self.err_est):
            yield {"t": t, "log_p": lp, "p": math.exp(lp), "err_est": e,
                   "method": self.method, "process": self.process}


def survival_curve(process: str, basis, z, t_grid, cfg: QuadConfig = QuadConfig()) -> SurvivalCurve:
    """Quadrature tail on a grid; ``process`` is one of ibm, btbm, bm."""
    process = process.lower()
    ts = np.asarray(t_grid, dtype=float)
    if process == "bm":
        law = ExitLaw(basis, z)
        return SurvivalCurve(ts, law.log_survival(ts), "quadrature", "BM",
                             meta={"domain": basis.domain.to_json(), "z": z})
    fn = {"ibm": ibm_tail, "btbm": btbm_tail}.get(process)
    if fn is None:
        raise ValueError(f"unknown process {process!r}")
    results = [fn(basis, z, float(t), cfg, full_output=True) for t in ts]
    return SurvivalCurve(
        ts,
        [r.log_value for r in results],
        "quadrature",
        process.upper(),
        err_est=[r.rel_err for r in results],
        meta={"domain": basis.domain.to_json(), "z": z},
    )
