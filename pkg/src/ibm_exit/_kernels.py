"""Numba path kernels.  Each takes a ``numpy.random.Generator`` it owns for the call."""

import math

import numpy as np
from numba import njit

# crossing probabilities below exp(-_SKIP) are not sampled
_SKIP = 40.0


@njit(nogil=True, cache=True)
def box_exit_times(rng, lo, hi, z, dt, n, max_steps, bridge, out_t, out_cens):
    """Euler walk in the box prod (lo_i, hi_i), with per-face bridge crossing checks."""
    d = z.shape[0]
    sq = math.sqrt(dt)
    x = np.empty(d)
    for p in range(n):
        for i in range(d):
            x[i] = z[i]
        k = 0
        exited = False
        while k < max_steps and not exited:
            k += 1
            for i in range(d):
                xn = x[i] + sq * rng.standard_normal()
                if xn <= lo[i] or xn >= hi[i]:
                    exited = True
                elif bridge:
                    q = 2.0 * (x[i] - lo[i]) * (xn - lo[i]) / dt
                    if q < _SKIP and rng.random() < math.exp(-q):
                        exited = True
                    q = 2.0 * (hi[i] - x[i]) * (hi[i] - xn) / dt
                    if q < _SKIP and rng.random() < math.exp(-q):
                        exited = True
                x[i] = xn
        if exited:
            # crossing happened somewhere inside the last step
            out_t[p] = (k - 0.5) * dt
            out_cens[p] = False
        else:
            out_t[p] = k * dt
            out_cens[p] = True


@njit(nogil=True, cache=True)
def disk_exit_times(rng, radius, z0, z1, dt, n, max_steps, out_t, out_cens):
    sq = math.sqrt(dt)
    r2 = radius * radius
    for p in range(n):
        x = z0
        y = z1
        k = 0
        exited = False
        while k < max_steps:
            k += 1
            x += sq * rng.standard_normal()
            y += sq * rng.standard_normal()
            if x * x + y * y >= r2:
                exited = True
                break
        if exited:
            out_t[p] = (k - 0.5) * dt
            out_cens[p] = False
        else:
            out_t[p] = k * dt
            out_cens[p] = True


@njit(nogil=True, cache=True)
def clock_stays_inside(rng, upper, lower, t, dt, bridge, out):
    """Does the inner Brownian clock stay in (-lower, upper) on [0, t]?

    The running extremes of each step are refined by sampling the maximum
    and minimum of the Brownian bridge between grid points:
    max = (a + b + sqrt((b - a)^2 - 2 h log U)) / 2.
    """
    n = upper.shape[0]
    for p in range(n):
        up = upper[p]
        dn = -lower[p]
        y = 0.0
        s = 0.0
        alive = True
        while s < t:
            h = dt if s + dt <= t else t - s
            if h <= 0.0:
                break
            yn = y + math.sqrt(h) * rng.standard_normal()
            if yn >= up or yn <= dn:
                alive = False
                break
            if bridge:
                diff = yn - y
                if 2.0 * (up - y) * (up - yn) / h < _SKIP:
                    mx = 0.5 * (y + yn + math.sqrt(diff * diff - 2.0 * h * math.log(1.0 - rng.random())))
                    if mx >= up:
                        alive = False
                        break
                if 2.0 * (y - dn) * (yn - dn) / h < _SKIP:
                    mn = 0.5 * (y + yn - math.sqrt(diff * diff - 2.0 * h * math.log(1.0 - rng.random())))
                    if mn <= dn:
                        alive = False
                        break
            y = yn
            s += h
        out[p] = alive
