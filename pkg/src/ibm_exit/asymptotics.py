"""Closed-form large-time asymptotics and their quadrature companions.

All closed forms are returned as natural logarithms.  Companion routines
(``*_integral``) evaluate the corresponding integrals numerically in the log
domain so the ratio ``integral / formula`` can be checked directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quad import locate_support, log_quad
from .special import bessel_zero
from .spectral import SpectralBasis

_PI = math.pi
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class LaplaceError(ValueError):
    """The Laplace formula does not apply (boundary maximum, f'' >= 0, h(x0) = 0)."""


@dataclass(frozen=True)
class LaplaceProblem:
    """Integral of ``h(x) exp(lam f(x))`` over ``(lower, upper)``.

    ``f`` must have a unique interior maximum; ``x0`` may be given, otherwise
    it is searched for in ``bracket``.
    """

    h: Callable[[float], float]
    f: Callable[[float], float]
    lam: float
    bracket: tuple = (0.0, 10.0)
    x0: float | None = None
    lower: float = 0.0
    upper: float = math.inf


def _golden_max(f, a, b, tol=1e-10):
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol * (1.0 + abs(a) + abs(b)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _derivs(f, x, h):
    f0, fp, fm = f(x), f(x + h), f(x - h)
    return (fp - fm) / (2 * h), (fp - 2 * f0 + fm) / (h * h)


def locate_max(problem: LaplaceProblem):
    """Return ``(x0, f''(x0))`` after checking the interior-maximum conditions."""
    f = problem.f
    a, b = problem.bracket
    x0 = problem.x0 if problem.x0 is not None else _golden_max(f, a, b)
    h = 1e-4 * (1.0 + abs(x0))
    # Newton polish on f'
    for _ in range(20):
        d1, d2 = _derivs(f, x0, h)
        if d2 >= 0:
            break
        step = d1 / d2
        x0 -= step
        if abs(step) < 1e-13 * (1.0 + abs(x0)):
            break
    d1, d2 = _derivs(f, x0, h)
    if d2 >= 0:
        raise LaplaceError(f"f''(x0) = {d2:.3e} is not negative at x0 = {x0:.6g}")
    if abs(d1) > 1e-6 * (1.0 + abs(d2)):
        raise LaplaceError(f"f'(x0) = {d1:.3e}: the maximum is not interior")
    lo, hi = problem.bracket
    if not lo < x0 < hi or not problem.lower < x0 < problem.upper:
        raise LaplaceError(f"maximum {x0} lies on the boundary of the search bracket")
    return x0, d2


def laplace_asymptotic(problem: LaplaceProblem) -> float:
    """log of ``h(x0) exp(lam f(x0)) sqrt(2 pi / (lam |f''(x0)|))``; needs ``h(x0) > 0``."""
    x0, d2 = locate_max(problem)
    hx = problem.h(x0)
    if hx <= 0:
        raise LaplaceError(f"h(x0) = {hx} must be positive for a log-domain result")
    return math.log(hx) + problem.lam * problem.f(x0) + 0.5 * math.log(2 * _PI / (problem.lam * abs(d2)))


def laplace_integral(problem: LaplaceProblem, rel_tol: float = 1e-10) -> float:
    """log of the integral itself by adaptive quadrature (``h > 0`` on the support)."""
    x0, d2 = locate_max(problem)
    lam = problem.lam
    width = 1.0 / math.sqrt(lam * abs(d2))

    def g(x):
        x = np.atleast_1d(x)
        out = np.full_like(x, -np.inf)
        ok = (x > problem.lower) & (x < problem.upper)
        for i in np.nonzero(ok)[0]:
            hv = problem.h(float(x[i]))
            if hv > 0:
                out[i] = math.log(hv) + lam * problem.f(float(x[i]))
        return out

    lo = max(problem.lower, x0 - 40 * width)
    hi = min(problem.upper, x0 + 40 * width)
    pts = list(np.linspace(lo, hi, 17)[1:-1])
    return log_quad(g, lo, hi, rel_tol=rel_tol, points=pts).log_value


# -- the three model integrals ------------------------------------------------------


def asympt_x_plus_xinv2(lam: float) -> float:
    """log of exp(-3 lam 2^{-2/3}) sqrt(2^{4/3} pi / (3 lam))."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    return -3.0 * lam * 2 ** (-2 / 3) + 0.5 * math.log(2 ** (4 / 3) * _PI / (3.0 * lam))


def integral_x_plus_xinv2(lam: float, rel_tol: float = 1e-11) -> float:
    """log int_0^inf exp(-lam (x + x^-2)) dx by log-domain quadrature in log x."""

    def g(y):
        x = np.exp(y)
        return y - lam * (x + 1.0 / (x * x))

    a, b, pts = locate_support(g, -2.0, 2.0, step=0.05, drop=50.0)
    return log_quad(g, a, b, rel_tol=rel_tol, points=pts).log_value


def _gauss_clock_exponent(a, b, t):
    return -3.0 * a ** (1 / 3) * b ** (2 / 3) * 2 ** (-2 / 3) * t ** (1 / 3)


def _check_abt(a, b, t):
    if not (a > 0 and b > 0 and t > 0):
        raise ValueError("a, b and t must be positive")


def asympt_gauss_clock(a: float, b: float, t: float) -> float:
    """log of sqrt(pi/3) 2^{2/3} a^{1/6} b^{-2/3} t^{1/6} exp(-3 a^{1/3} b^{2/3} 2^{-2/3} t^{1/3})."""
    _check_abt(a, b, t)
    return (
        0.5 * math.log(_PI / 3)
        + (2 / 3) * math.log(2)
        + math.log(a) / 6
        - (2 / 3) * math.log(b)
        + math.log(t) / 6
        + _gauss_clock_exponent(a, b, t)
    )


def asympt_u_gauss_clock(a: float, b: float, t: float) -> float:
    """log of 2 sqrt(pi/3) a^{1/2} b^{-1} t^{1/2} exp(-3 a^{1/3} b^{2/3} 2^{-2/3} t^{1/3})."""
    _check_abt(a, b, t)
    return (
        math.log(2.0)
        + 0.5 * math.log(_PI / 3)
        + 0.5 * math.log(a)
        - math.log(b)
        + 0.5 * math.log(t)
        + _gauss_clock_exponent(a, b, t)
    )


def gauss_clock_integral(a: float, b: float, t: float, power: int = 0, rel_tol: float = 1e-11) -> float:
    """log int_0^inf u^power exp(-a t / u^2 - b u) du by quadrature in log u."""
    _check_abt(a, b, t)

    def g(y):
        u = np.exp(y)
        return (power + 1) * y - a * t / (u * u) - b * u

    centre = math.log((2 * a * t / b) ** (1 / 3))
    lo, hi, pts = locate_support(g, centre - 2.0, centre + 2.0, step=0.05, drop=50.0)
    return log_quad(g, lo, hi, rel_tol=rel_tol, points=pts).log_value


# -- constants of the main limit theorems --------------------------------------------


@dataclass(frozen=True)
class EnvelopeConstants:
    lambda_1: float
    a1_of_z: float
    C_z: float
    C_lambda: float

    @classmethod
    def from_values(cls, lambda_1: float, a1_of_z: float) -> "EnvelopeConstants":
        return cls(
            lambda_1=lambda_1,
            a1_of_z=a1_of_z,
            C_z=lambda_1 * math.sqrt(2 * _PI / 3) * a1_of_z**2,
            C_lambda=_PI ** (-1 / 6) * 2 ** (13 / 6) * 3 ** (-0.5) * lambda_1 ** (1 / 3),
        )

    @classmethod
    def from_basis(cls, basis: SpectralBasis, z) -> "EnvelopeConstants":
        return cls.from_values(basis.lambda_1, float(basis.coeff(z)[0]))


def ibm_rate(lambda_1: float) -> float:
    """(3/2) pi^{2/3} lambda_1^{2/3}: the t^{1/3} decay rate of the IBM tail."""
    return 1.5 * _PI ** (2 / 3) * lambda_1 ** (2 / 3)


def btbm_rate(lambda_1: float) -> float:
    """(3/2) 2^{-2/3} pi^{2/3} lambda_1^{2/3}: the t^{1/3} decay rate of the BTBM tail."""
    return 2 ** (-2 / 3) * ibm_rate(lambda_1)


def ibm_envelope(basis: SpectralBasis, z, t):
    """(log lower, log upper) envelope 2 C(z), pi C(z) times t^{1/2} exp(-rate t^{1/3})."""
    c = EnvelopeConstants.from_basis(basis, z)
    t = np.asarray(t, dtype=float)
    core = 0.5 * np.log(t) - ibm_rate(c.lambda_1) * np.cbrt(t)
    lower = math.log(2 * c.C_z) + core
    upper = math.log(_PI * c.C_z) + core
    if lower.ndim == 0:
        return float(lower), float(upper)
    return lower, upper


def btbm_limit_curve(basis: SpectralBasis, z, t):
    """log of C(lambda_D) psi(z) int psi t^{1/6} exp(-btbm_rate t^{1/3})."""
    c = EnvelopeConstants.from_basis(basis, z)
    t = np.asarray(t, dtype=float)
    out = math.log(c.C_lambda * c.a1_of_z) + np.log(t) / 6 - btbm_rate(c.lambda_1) * np.cbrt(t)
    return float(out) if out.ndim == 0 else out


def xi_clock_constant(c: float, beta: float) -> float:
    """Rate constant of -log P[eta_(-xi,xi) > t] ~ K t^{beta/(2+beta)} when -log P[xi > t] ~ c t^beta."""
    if not (c > 0 and beta > 0):
        raise ValueError("c and beta must be positive")
    q = 2.0 + beta
    return (
        2 ** (-2 * beta / q)
        * (q / 2)
        * c ** (2 / q)
        * beta ** (-beta / q)
        * _PI ** (2 * beta / q)
    )


def xi_clock_exponent(beta: float) -> float:
    return beta / (2.0 + beta)


def parabola_l(alpha: float, A: float, n: int) -> float:
    """Brownian decay constant l of the parabola-shaped domain {|Y| < A x^alpha} in R^n."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if not A > 0:
        raise ValueError("A must be positive")
    if n < 2:
        raise ValueError("dimension must be at least 2")
    j = bessel_zero((n - 3) / 2, 1)
    r = (1 - alpha) / alpha
    log_inner = (
        math.log(_PI)
        + (2 / alpha) * math.log(j)
        - 2 * math.log(A)
        - ((3 * alpha + 1) / alpha) * math.log(2)
        - r * math.log(r)
        + 2 * math.lgamma((1 - alpha) / (2 * alpha))
        - 2 * math.lgamma(1 / (2 * alpha))
    )
    return ((1 + alpha) / alpha) * math.exp(alpha / (alpha + 1) * log_inner)


def parabola_iterated_constants(alpha: float, l: float):
    """(IBM, BTBM) constants of lim t^{-(1-a)/(3+a)} log P = -constant in a parabola."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if not l > 0:
        raise ValueError("l must be positive")
    q = 3 + alpha
    ibm = (
        (q / (2 + 2 * alpha))
        * ((1 + alpha) / (1 - alpha)) ** ((1 - alpha) / q)
        * _PI ** ((2 - 2 * alpha) / q)
        * l ** ((2 + 2 * alpha) / q)
    )
    return ibm, 2 ** ((2 * alpha - 2) / q) * ibm
