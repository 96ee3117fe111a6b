"""Adaptive Gauss-Kronrod quadrature for integrands given by their logarithm.

The tail probabilities assembled in :mod:`ibm_exit.compose` routinely sit far
below the smallest positive double (``exp(-3000)`` and less), so integrands
are passed around as ``log f`` and every panel is summed after shifting by its
own maximum.  Panel results are combined with ``logaddexp``.
"""

from __future__ import annotations

import heapq
import math
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

# 7-point Gauss / 15-point Kronrod on [-1, 1] (QUADPACK qk15)
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
K_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
G_WEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod abscissae (1, 3, 5 and the centre)
for i, w in zip((1, 3, 5, 7), _WG):
    G_WEIGHTS[i] = w
    G_WEIGHTS[14 - i] = w


class QuadratureError(RuntimeError):
    """Raised when the subdivision budget is exhausted before convergence."""

    def __init__(self, message: str, log_value: float, rel_err: float):
        super().__init__(f"{message} (achieved relative error {rel_err:.3e})")
        self.log_value = log_value
        self.rel_err = rel_err


class LogQuadResult(NamedTuple):
    log_value: float
    rel_err: float
    n_panels: int


def _panel(log_f, a, b):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * NODES
    lv = np.asarray(log_f(x), dtype=float)
    lv = np.where(np.isnan(lv), -np.inf, lv)
    m = float(np.max(lv))
    if m == -math.inf:
        return -math.inf, -math.inf
    e = np.exp(lv - m)
    k = float(e @ K_WEIGHTS) * half
    g = float(e @ G_WEIGHTS) * half
    log_val = m + math.log(k) if k > 0 else -math.inf
    diff = abs(k - g)
    log_err = m + math.log(diff) if diff > 0 else -math.inf
    return log_val, log_err


def log_quad(
    log_f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    points: Sequence[float] | None = None,
    max_panels: int = 4000,
) -> LogQuadResult:
    """Integrate ``exp(log_f)`` over ``[a, b]`` and return the log of the integral.

    ``log_f`` must accept a 1-D array of abscissae.  ``points`` are optional
    interior breakpoints used to seed the subdivision.  The error estimate is
    the raw Kronrod-minus-Gauss difference, summed over panels, and the
    routine stops once it falls below ``rel_tol`` times the running total.
    """
    edges = [a] + sorted(p for p in (points or ()) if a < p < b) + [b]
    heap = []
    logs = {}
    errs = {}
    counter = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        lv, le = _panel(log_f, lo, hi)
        logs[counter], errs[counter] = lv, le
        heapq.heappush(heap, (-le, counter, lo, hi))
        counter += 1

    log_tol = math.log(rel_tol)
    while True:
        total = float(logsumexp(list(logs.values())))
        err = float(logsumexp(list(errs.values())))
        if total == -math.inf:
            return LogQuadResult(-math.inf, 0.0, len(logs))
        if err <= log_tol + total:
            return LogQuadResult(total, math.exp(err - total), len(logs))
        if len(logs) >= max_panels:
            raise QuadratureError("log_quad did not converge", total, math.exp(err - total))
        _, idx, lo, hi = heapq.heappop(heap)
        del logs[idx], errs[idx]
        mid = 0.5 * (lo + hi)
        for sub in ((lo, mid), (mid, hi)):
            lv, le = _panel(log_f, *sub)
            logs[counter], errs[counter] = lv, le
            heapq.heappush(heap, (-le, counter, *sub))
            counter += 1


def locate_support(
    log_g: Callable[[np.ndarray], np.ndarray],
    y_lo: float,
    y_hi: float,
    step: float = 0.25,
    drop: float = 60.0,
    max_extend: int = 12,
):
    """Find an interval carrying all but ``exp(-drop)`` of a unimodal log-integrand.

    ``log_g`` is sampled on a grid of spacing ``step`` over ``[y_lo, y_hi]``;
    if the peak sits at a grid end, the grid is extended.  Returns
    ``(a, b, grid_points_inside)``.
    """
    for _ in range(max_extend):
        n = max(3, int(math.ceil((y_hi - y_lo) / step)) + 1)
        ys = np.linspace(y_lo, y_hi, n)
        vals = np.asarray(log_g(ys), dtype=float)
        vals = np.where(np.isnan(vals), -np.inf, vals)
        peak = float(np.max(vals))
        if peak == -math.inf:
            y_lo, y_hi = y_lo - 4.0, y_hi + 4.0
            continue
        keep = np.nonzero(vals > peak - drop)[0]
        i0, i1 = int(keep[0]), int(keep[-1])
        width = y_hi - y_lo
        extended = False
        if i0 == 0:
            y_lo -= 0.5 * width
            extended = True
        if i1 == n - 1:
            y_hi += 0.5 * width
            extended = True
        if extended:
            continue
        a, b = float(ys[i0 - 1]), float(ys[i1 + 1])
        return a, b, [float(y) for y in ys[i0:i1 + 1]]
    raise QuadratureError("could not bracket the integrand support", -math.inf, math.inf)
