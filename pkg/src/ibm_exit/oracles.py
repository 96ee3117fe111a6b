"""Independent reference computations used by the acceptance runner and tests.

None of these share code paths with the production evaluators: eigenvalues
come from finite differences, Bessel zeros from bisection on the power
series, and the interval kernel from a plain Python sum.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.sparse import diags, identity, kron
from scipy.sparse.linalg import eigsh

from .special import bessel_j_series


def fd_interval_eigenvalues(length: float, k: int, n: int = 10_000, extrapolate: bool = True) -> np.ndarray:
    """Lowest ``k`` Dirichlet eigenvalues of -Laplacian/2 on (0, length).

    Second-order differences on ``n`` interior points; with ``extrapolate``
    the grids ``n`` and ``2n + 1`` are combined by Richardson extrapolation.
    """

    def solve(m):
        h = length / (m + 1)
        d = np.full(m, 1.0 / h**2)
        e = np.full(m - 1, -0.5 / h**2)
        return eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1), eigvals_only=True)

    coarse = solve(n)
    if not extrapolate:
        return coarse
    return (4 * solve(2 * n + 1) - coarse) / 3


def fd_rectangle_eigenvalues(sides, k: int, n: int = 160, extrapolate: bool = True) -> np.ndarray:
    """Lowest ``k`` Dirichlet eigenvalues of -Laplacian/2 on a 2D box, 5-point stencil."""
    a, b = sides

    def solve(m):
        hx, hy = a / (m + 1), b / (m + 1)
        tx = diags([-np.ones(m - 1), 2 * np.ones(m), -np.ones(m - 1)], [-1, 0, 1]) / hx**2
        ty = diags([-np.ones(m - 1), 2 * np.ones(m), -np.ones(m - 1)], [-1, 0, 1]) / hy**2
        lap = 0.5 * (kron(tx, identity(m)) + kron(identity(m), ty))
        vals = eigsh(lap.tocsc(), k=k, sigma=0.0, which="LM", return_eigenvectors=False)
        return np.sort(vals)

    coarse = solve(n)
    if not extrapolate:
        return coarse
    return (4 * solve(2 * n + 1) - coarse) / 3


def bessel_j0_zero_bisection(lo: float = 2.0, hi: float = 3.0, tol: float = 1e-14) -> float:
    """First zero of J_0 by bisection on its power series."""
    f_lo = bessel_j_series(0, lo)
    if f_lo * bessel_j_series(0, hi) > 0:
        raise ValueError("bracket does not contain a sign change")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = bessel_j_series(0, mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def eta_survival_bruteforce(u: float, v: float, t: float, tol: float = 1e-16) -> float:
    """P_0[eta_(-u,v) > t] by direct summation of the sine series (t > 0)."""
    w = u + v
    total = 0.0
    n = 0
    while True:
        k = 2 * n + 1
        decay = math.exp(-k * k * math.pi**2 * t / (2 * w * w))
        total += 4 / (math.pi * k) * decay * math.sin(k * math.pi * u / w)
        if decay / k < tol and n > 5:
            return total
        n += 1


def interval_exit_moments(x: float):
    """(E tau, E tau^2) for Brownian motion started at x in (0, 1)."""
    return x * (1 - x), x * (1 - x) * (1 + x - x * x) / 3
