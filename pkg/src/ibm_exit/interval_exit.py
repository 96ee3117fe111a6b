"""Exit time of one-dimensional Brownian motion from an interval.

Everything is expressed through the unit interval: a Brownian motion started
at distance ``u`` from the left end and ``v`` from the right end survives to
time ``t`` with the same probability as one started at ``x = u / (u + v)`` in
``(0, 1)`` survives to the scaled time ``s = t / (u + v)**2``.

Two representations are used.  For ``s >= S_SWITCH`` the eigenfunction
series

    P_x[eta > s] = (4/pi) sum_n (2n+1)^-1 exp(-(2n+1)^2 pi^2 s / 2) sin((2n+1) pi x)

converges in a handful of terms.  For small ``s`` the method-of-images form

    P_x[eta > s] = erf(x r) + sum_{m>=1} (-1)^m [erfc((m - x) r) - erfc((m + x) r)],
    r = 1 / sqrt(2 s),

is used instead.  All results are natural logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc

S_SWITCH = 0.15
SERIES_RTOL = 1e-14
MIN_TERMS = 5

_LOG_4_OVER_PI = math.log(4.0 / math.pi)
_HALF_PI2 = 0.5 * math.pi**2


@dataclass(frozen=True)
class EtaQuery:
    """Exit of ``(-u, v)`` by a Brownian motion started at 0, asked at time ``t``."""

    u: float
    v: float
    t: float

    def __post_init__(self):
        if not (self.u > 0 and self.v > 0):
            raise ValueError(f"interval half-lengths must be positive, got u={self.u}, v={self.v}")
        if self.t < 0:
            raise ValueError(f"time must be nonnegative, got {self.t}")

    @property
    def x(self) -> float:
        return self.u / (self.u + self.v)

    @property
    def s(self) -> float:
        return self.t / (self.u + self.v) ** 2

    @classmethod
    def from_scaled(cls, x: float, s: float, width: float = 1.0) -> "EtaQuery":
        return cls(u=x * width, v=(1.0 - x) * width, t=s * width**2)


def _n_eigen_terms(s_min: float) -> int:
    # next-term bound relative to the leading term: (pi/2) exp(-((2n+1)^2 - 1) pi^2 s / 2)
    if s_min <= 0:
        raise ValueError("eigen series needs s > 0")
    need = (math.log(math.pi / 2 / SERIES_RTOL)) / (_HALF_PI2 * s_min) + 1.0
    n = int(math.ceil((math.sqrt(need) - 1.0) / 2.0)) + 1
    return max(MIN_TERMS, n)


def _n_image_terms(s_max: float) -> int:
    r = 1.0 / math.sqrt(2.0 * s_max)
    # erfc(y) < 1e-17 once y > 6.1; terms start at (m - 1/2) r
    return max(MIN_TERMS, int(math.ceil(6.2 / r + 1.0)))


def _log_surv_eigen(x, s):
    n = np.arange(_n_eigen_terms(float(np.min(s))))
    k = (2 * n + 1).astype(float)
    xs = x[..., None]
    ss = s[..., None]
    terms = np.exp(-(k * k - 1.0) * _HALF_PI2 * ss) * np.sin(k * math.pi * xs) / k
    total = terms.sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(total > 0, _LOG_4_OVER_PI - _HALF_PI2 * s + np.log(total), -np.inf)


def _log_surv_images(x, s):
    out = np.zeros_like(x)
    pos = s > 0
    if not np.any(pos):
        return out
    xp, sp = x[pos], s[pos]
    r = 1.0 / np.sqrt(2.0 * sp)
    total = erf(xp * r)
    for m in range(1, _n_image_terms(float(np.max(sp))) + 1):
        total = total + (-1) ** m * (erfc((m - xp) * r) - erfc((m + xp) * r))
    with np.errstate(divide="ignore"):
        out[pos] = np.where(total > 0, np.log(np.minimum(total, 1.0)), -np.inf)
    return out


def _log_density_eigen(x, s):
    n = np.arange(_n_eigen_terms(float(np.min(s))))
    k = (2 * n + 1).astype(float)
    terms = k * np.exp(-(k * k - 1.0) * _HALF_PI2 * s[..., None]) * np.sin(k * math.pi * x[..., None])
    total = terms.sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(total > 0, math.log(2 * math.pi) - _HALF_PI2 * s + np.log(total), -np.inf)


def _log_density_images(x, s):
    # x <= 1/2 here, so every image exponent is dominated by exp(-x^2 r^2)
    out = np.full_like(x, -np.inf)
    pos = s > 0
    if not np.any(pos):
        return out
    xp, sp = x[pos], s[pos]
    r = 1.0 / np.sqrt(2.0 * sp)
    lead = xp * xp * r * r
    total = xp * r
    for m in range(1, _n_image_terms(float(np.max(sp))) + 1):
        a, b = (m - xp) * r, (m + xp) * r
        total = total - (-1) ** m * (a * np.exp(lead - a * a) - b * np.exp(lead - b * b))
    with np.errstate(divide="ignore", invalid="ignore"):
        out[pos] = np.where(
            total > 0, -lead + np.log(total) - math.log(math.sqrt(math.pi)) - np.log(sp), -np.inf
        )
    return out


def _prepare_unit(x, s):
    x, s = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(s, dtype=float))
    # reflection symmetry x <-> 1 - x; the images form assumes x <= 1/2
    return np.minimum(x, 1.0 - x), s


def _dispatch(x, s, eigen, images, at_zero):
    scalar = x.ndim == 0
    x = np.atleast_1d(x).astype(float)
    s = np.atleast_1d(s).astype(float)
    out = np.empty_like(x)
    inside = (x > 0) & (s >= 0)
    out[~inside] = -np.inf
    hi = inside & (s >= S_SWITCH)
    lo = inside & (s < S_SWITCH)
    if np.any(hi):
        out[hi] = eigen(x[hi], s[hi])
    if np.any(lo):
        out[lo] = images(x[lo], s[lo])
    out[inside & (s == 0)] = at_zero
    return float(out[0]) if scalar else out


def eta_survival_unit(x, s):
    """log P_x[eta_(0,1) > s] for ``0 < x < 1`` and ``s >= 0`` (broadcasts)."""
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr <= 0) | (x_arr >= 1)):
        raise ValueError("x must lie strictly inside (0, 1)")
    if np.any(np.asarray(s) < 0):
        raise ValueError("s must be nonnegative")
    xr, sr = _prepare_unit(x, s)
    return _dispatch(xr, sr, _log_surv_eigen, _log_surv_images, 0.0)


def eta_survival(u, v=None, t=None):
    """log P_0[eta_(-u, v) > t]; broadcasts over array arguments.

    An :class:`EtaQuery` may be passed as the only argument.
    """
    if isinstance(u, EtaQuery):
        u, v, t = u.u, u.v, u.t
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u <= 0) or np.any(v <= 0):
        raise ValueError("u and v must be positive")
    w = u + v
    return eta_survival_unit(u / w, np.asarray(t, dtype=float) / (w * w))


def eta_log_density_unit(x, s):
    """log of the exit-time density of ``(0, 1)`` from ``x`` at scaled time ``s``."""
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr <= 0) | (x_arr >= 1)):
        raise ValueError("x must lie strictly inside (0, 1)")
    xr, sr = _prepare_unit(x, s)
    return _dispatch(xr, sr, _log_density_eigen, _log_density_images, -np.inf)


def eta_asymptotic_unit(x, s):
    """Large-time form log((4/pi) sin(pi x)) - pi^2 s / 2."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = _LOG_4_OVER_PI + np.log(np.sin(math.pi * x)) - _HALF_PI2 * np.asarray(s, dtype=float)
    return float(out) if out.ndim == 0 else out


def _log_sym_derivative_eigen(u, t):
    s = t / (4.0 * u * u)
    n = np.arange(_n_eigen_terms(float(np.min(s))))
    k = (2 * n + 1).astype(float)
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    terms = sign * k * np.exp(-(k * k - 1.0) * _HALF_PI2 * s[..., None])
    total = terms.sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(
            total > 0,
            math.log(math.pi) + np.log(t) - 3.0 * np.log(u) - _HALF_PI2 * s + np.log(total),
            -np.inf,
        )


def _log_sym_derivative_images(u, t):
    # d/du P = 4 t^{-1/2} sum_n (-1)^n (2n+1) phi((2n+1) u / sqrt(t))
    z = u / np.sqrt(t)
    s = t / (4.0 * u * u)
    lead = 0.5 * z * z
    total = np.ones_like(z)
    for n in range(1, _n_image_terms(float(np.max(s))) + 1):
        k = 2 * n + 1
        total = total + (-1) ** n * k * np.exp(lead - 0.5 * (k * z) ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(
            total > 0,
            math.log(4.0) - 0.5 * np.log(t) - 0.5 * math.log(2 * math.pi) - lead + np.log(total),
            -np.inf,
        )


def log_eta_symmetric_derivative(u, t):
    """log of d/du P_0[eta_(-u, u) > t]; the derivative is nonnegative everywhere."""
    u = np.asarray(u, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(u <= 0) or np.any(t <= 0):
        raise ValueError("u and t must be positive")
    u, t = np.broadcast_arrays(u, t)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    t = np.atleast_1d(t)
    s = t / (4.0 * u * u)
    out = np.empty_like(u)
    hi = s >= S_SWITCH
    if np.any(hi):
        out[hi] = _log_sym_derivative_eigen(u[hi], t[hi])
    if np.any(~hi):
        out[~hi] = _log_sym_derivative_images(u[~hi], t[~hi])
    return float(out[0]) if scalar else out


def eta_symmetric_derivative(u, t):
    """d/du P_0[eta_(-u, u) > t] in units of 1/length."""
    return np.exp(log_eta_symmetric_derivative(u, t))
