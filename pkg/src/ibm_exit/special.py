"""Bessel functions of the first kind and their positive zeros.

Integer orders are evaluated with the trapezoidal rule applied to Bessel's
integral ``J_m(x) = (1/pi) int_0^pi cos(m t - x sin t) dt``; the integrand is
periodic and analytic, so the rule converges geometrically and keeps full
absolute precision out to large ``x``.  Half-integer orders use the closed
forms for ``J_{-1/2}``, ``J_{1/2}`` and upward recurrence.  A plain power
series is kept for small arguments and for cross-checking.
"""

from __future__ import annotations

import math

import numpy as np

MAX_ZERO_INDEX = 4000
MAX_ORDER = 400


class BesselError(ValueError):
    """Unsupported order or a zero index past the supported range."""


def _is_half_integer(nu: float) -> bool:
    return abs(2 * nu - round(2 * nu)) < 1e-12 and round(2 * nu) % 2 != 0


def _is_integer(nu: float) -> bool:
    return abs(nu - round(nu)) < 1e-12


def bessel_j_series(nu: float, x):
    """Power series for ``J_nu(x)``; accurate to ~1e-13 for ``|x| <= 8``."""
    x = np.asarray(x, dtype=float)
    half = 0.5 * np.abs(x)
    with np.errstate(divide="ignore"):
        term = np.power(half, nu) / math.gamma(nu + 1)
    total = term.copy()
    q = half * half
    for k in range(1, 200):
        term = -term * q / (k * (k + nu))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _bessel_j_integer(m: int, x: np.ndarray) -> np.ndarray:
    xmax = float(np.max(np.abs(x))) if x.size else 0.0
    n = int(0.5 * (xmax + abs(m)) + 5.0 * xmax ** (1 / 3) + 30)
    theta = np.linspace(0.0, math.pi, n + 1)
    w = np.full(n + 1, math.pi / n)
    w[0] *= 0.5
    w[-1] *= 0.5
    vals = np.cos(m * theta[None, :] - x.reshape(-1, 1) * np.sin(theta)[None, :])
    return (vals @ w / math.pi).reshape(x.shape)


def _bessel_j_half_integer(nu: float, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    c = np.sqrt(2.0 / (math.pi * x))
    j_prev = c * np.cos(x)  # J_{-1/2}
    if nu == -0.5:
        return j_prev
    j_cur = c * np.sin(x)  # J_{1/2}
    order = 0.5
    while order < nu - 1e-9:
        j_prev, j_cur = j_cur, (2 * order / x) * j_cur - j_prev
        order += 1.0
    # upward recurrence loses digits for x < nu, where the power series has no cancellation
    small = x < nu + 1.0
    if np.any(small):
        j_cur = np.where(small, bessel_j_series(nu, np.where(small, x, 0.0)), j_cur)
    return j_cur


def bessel_j(nu: float, x):
    """``J_nu(x)`` for integer ``nu`` (any real x) or half-integer ``nu >= -1/2`` (x > 0)."""
    x = np.asarray(x, dtype=float)
    if _is_integer(nu):
        m = int(round(nu))
        if abs(m) > MAX_ORDER:
            raise BesselError(f"order {m} exceeds supported maximum {MAX_ORDER}")
        return _bessel_j_integer(m, x)
    if _is_half_integer(nu) and nu >= -0.5:
        if np.any(x <= 0):
            raise BesselError("half-integer orders need x > 0")
        return _bessel_j_half_integer(nu, x)
    raise BesselError(f"unsupported Bessel order {nu!r}")


def bessel_j_prime(nu: float, x):
    """Derivative ``J'_nu = (J_{nu-1} - J_{nu+1}) / 2``."""
    if nu == -0.5:
        x = np.asarray(x, dtype=float)
        # J_{-3/2} is outside the recurrence start; differentiate the closed form
        c = np.sqrt(2.0 / (math.pi * x))
        return -c * np.sin(x) - 0.5 * c * np.cos(x) / x
    return 0.5 * (bessel_j(nu - 1, x) - bessel_j(nu + 1, x))


def mcmahon_guess(nu: float, k: int) -> float:
    """McMahon's large-zero expansion for the k-th positive zero of ``J_nu``."""
    mu = 4.0 * nu * nu
    beta = (k + 0.5 * nu - 0.25) * math.pi
    eb = 8.0 * beta
    return (
        beta
        - (mu - 1) / eb
        - 4 * (mu - 1) * (7 * mu - 31) / (3 * eb**3)
        - 32 * (mu - 1) * (83 * mu**2 - 982 * mu + 3779) / (15 * eb**5)
    )


def _first_zero_guess(nu: float) -> float:
    if nu <= 1.0:
        return mcmahon_guess(nu, 1)
    # Olver's uniform expansion for the first zero of large order
    return nu + 1.8557571 * nu ** (1 / 3) + 1.033150 * nu ** (-1 / 3) - 0.00397 / nu


def _refine_in_bracket(nu, lo, hi, guess, tol):
    flo = float(bessel_j(nu, lo))
    x = min(max(guess, lo), hi)
    for _ in range(100):
        fx = float(bessel_j(nu, x))
        if fx == 0.0:
            return x
        if (fx < 0) == (flo < 0):
            lo, flo = x, fx
        else:
            hi = x
        step = fx / float(bessel_j_prime(nu, x))
        xn = x - step
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) < tol * max(1.0, abs(x)):
            # one extra Newton step once inside the quadratic basin
            return xn - float(bessel_j(nu, xn)) / float(bessel_j_prime(nu, xn))
        x = xn
    return x


def bessel_zeros(nu: float, count: int, tol: float = 1e-12) -> np.ndarray:
    """First ``count`` positive zeros of ``J_nu``.

    Each zero starts from a McMahon (or Olver, for the first zero of large
    order) guess, is bracketed by a sign change, and is polished with
    safeguarded Newton iteration to relative tolerance ``tol``.
    """
    if count < 1:
        return np.empty(0)
    if count > MAX_ZERO_INDEX:
        raise BesselError(f"zero index {count} exceeds table growth limit {MAX_ZERO_INDEX}")
    if not (_is_integer(nu) or (_is_half_integer(nu) and nu >= -0.5)):
        raise BesselError(f"unsupported Bessel order {nu!r}")
    zeros = []
    prev = max(nu, 0.0) if nu > -0.5 else 0.0
    for k in range(1, count + 1):
        guess = _first_zero_guess(nu) if k == 1 else max(mcmahon_guess(nu, k), zeros[-1] + 2.0)
        start = prev + 1e-6 if k == 1 else zeros[-1] + 1e-3
        if start <= 0:
            start = 1e-6
        # scan for the first sign change after the previous zero; spacing of zeros exceeds 2.5
        step = 0.25
        a = start
        fa = float(bessel_j(nu, a))
        while True:
            b = a + step
            fb = float(bessel_j(nu, b))
            if (fa < 0) != (fb < 0) or fb == 0.0:
                break
            a, fa = b, fb
            if a > start + 20 + 2 * abs(nu):
                raise BesselError(f"no sign change found for zero {k} of J_{nu}")
        zeros.append(_refine_in_bracket(nu, a, b, guess if a <= guess <= b else 0.5 * (a + b), tol))
    return np.array(zeros)


def bessel_zero(nu: float, k: int = 1) -> float:
    """The k-th positive zero of ``J_nu``."""
    return float(bessel_zeros(nu, k)[-1])
