"""Monte Carlo oracles for Brownian, iterated and Brownian-time exit times.

Paths are processed in fixed-size blocks.  Block ``b`` draws from
``Philox(SeedSequence(seed, spawn_key=(b,)))``, so the stream a path sees
depends only on the seed and its block, never on how blocks are spread over
workers; block summaries are merged in block order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .interval_exit import eta_survival
from .compose import ExitLaw
from .spectral import Disk, Interval, Rectangle, SpectralBasis, _as_point, ground_eigenvalue

PROCESSES = ("ibm", "btbm")
ESTIMATORS = ("direct", "conditional")
CENSOR_FACTOR = 1e4


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-4
    n_paths: int = 100_000
    seed: int = 20240611
    bridge_correction: bool = True
    estimator: str = "direct"
    block_size: int = 2000
    workers: int | None = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.n_paths < 1000:
            raise ValueError("n_paths must be at least 1000")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}")
        if self.estimator == "direct" and self.dt > 1e-3:
            raise ValueError("direct estimator needs dt <= 1e-3")
        if self.block_size < 1:
            raise ValueError("block_size must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class TailEstimate:
    t: float
    p_hat: float
    std_err: float
    n_paths: int
    estimator: str
    process: str
    dt: float
    seed: int

    def to_dict(self):
        return asdict(self)


class ExitTimes(NamedTuple):
    times: np.ndarray
    censored: np.ndarray


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def worker_count(requested: int | None = None) -> int:
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("IBM_EXIT_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _blocks(n_paths, block_size):
    sizes = [block_size] * (n_paths // block_size)
    if n_paths % block_size:
        sizes.append(n_paths % block_size)
    return sizes


def _run_blocks(fn, cfg: SimConfig):
    sizes = _blocks(cfg.n_paths, cfg.block_size)
    jobs = list(enumerate(sizes))
    nw = worker_count(cfg.workers)
    if nw == 1:
        return [fn(block_rng(cfg.seed, b), size) for b, size in jobs]
    with ThreadPoolExecutor(max_workers=nw) as pool:
        return list(pool.map(lambda job: fn(block_rng(cfg.seed, job[0]), job[1]), jobs))


def _merge(stats):
    """Chan et al. pairwise merge of (n, mean, M2), in the given order."""
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in stats:
        if nb == 0:
            continue
        tot = n + nb
        delta = mb - mean
        mean += delta * nb / tot
        m2 += m2b + delta * delta * n * nb / tot
        n = tot
    return n, mean, m2


def _block_stats(values):
    values = np.asarray(values, dtype=float)
    mean = float(values.mean())
    return len(values), mean, float(((values - mean) ** 2).sum())


# -- Brownian exit ------------------------------------------------------------------


def sample_bm_exit(domain, z, cfg: SimConfig, rng: np.random.Generator, size: int = 1) -> ExitTimes:
    """Exit times of standard Brownian motion (generator Laplacian / 2) from ``domain``.

    Boxes use the per-face bridge crossing probability ``exp(-2 d1 d2 / dt)``
    when ``cfg.bridge_correction`` is set; the disk uses a plain Euler walk.
    Paths still inside after ``1e4 / lambda_1`` are censored.
    """
    if not domain.contains(z):
        raise ValueError(f"z={z!r} is not inside {domain}")
    max_steps = int(math.ceil(CENSOR_FACTOR / ground_eigenvalue(domain) / cfg.dt))
    out_t = np.empty(size)
    out_c = np.empty(size, dtype=np.bool_)
    if isinstance(domain, Disk):
        zz = _as_point(z, 2)
        _kernels.disk_exit_times(rng, domain.radius, zz[0], zz[1], cfg.dt, size, max_steps, out_t, out_c)
    else:
        if isinstance(domain, Interval):
            lo, hi = np.array([domain.a]), np.array([domain.b])
            zz = _as_point(z, 1)
        elif isinstance(domain, Rectangle):
            lo, hi = np.zeros(domain.dim), np.array(domain.sides)
            zz = _as_point(z, domain.dim)
        else:
            raise ValueError(f"unsupported domain {domain!r}")
        _kernels.box_exit_times(rng, lo, hi, zz, cfg.dt, size, max_steps, cfg.bridge_correction, out_t, out_c)
    return ExitTimes(out_t, out_c)


def bm_exit_mean(domain, z, cfg: SimConfig):
    """(mean exit time, standard error, censored count) over ``cfg.n_paths`` paths."""

    def block(rng, size):
        ex = sample_bm_exit(domain, z, cfg, rng, size)
        return _block_stats(ex.times) + (int(ex.censored.sum()),)

    res = _run_blocks(block, cfg)
    n, mean, m2 = _merge([r[:3] for r in res])
    return mean, math.sqrt(m2 / (n - 1) / n), sum(r[3] for r in res)


# -- iterated processes ---------------------------------------------------------------


def _check_process(process):
    process = process.lower()
    if process not in PROCESSES:
        raise ValueError(f"process must be one of {PROCESSES}")
    return process


def sample_iterated_exit(process, domain, z, t: float, cfg: SimConfig, rng, size: int = 1) -> np.ndarray:
    """Bernoulli samples of {tau_D(Z) > t} (IBM) or {tau_D(Z1) > t} (BTBM).

    The outer exit times are simulated first; the path of Z stays in D up to
    ``t`` exactly when the inner clock's swept range stays inside the outer
    survival window, i.e. ``-tau_minus < Y_s < tau_plus`` for all ``s <= t``
    (``|Y_s| < tau`` for BTBM).  The clock is then walked with bridge-sampled
    within-step extremes and stopped as soon as it leaves the window.
    """
    process = _check_process(process)
    if t == 0:
        return np.ones(size, dtype=bool)
    tau_plus = sample_bm_exit(domain, z, cfg, rng, size).times
    tau_minus = tau_plus if process == "btbm" else sample_bm_exit(domain, z, cfg, rng, size).times
    out = np.empty(size, dtype=np.bool_)
    _kernels.clock_stays_inside(rng, tau_plus, tau_minus, float(t), cfg.dt, cfg.bridge_correction, out)
    return out


def direct_tail(process, domain, z, t: float, cfg: SimConfig) -> TailEstimate:
    """Plain Bernoulli-counting estimate of the iterated exit tail at ``t``."""
    process = _check_process(process)
    counts = _run_blocks(lambda rng, size: int(sample_iterated_exit(process, domain, z, t, cfg, rng, size).sum()), cfg)
    n = cfg.n_paths
    p = sum(counts) / n
    return TailEstimate(float(t), p, math.sqrt(p * (1 - p) / n), n, "direct", process, cfg.dt, cfg.seed)


def inverse_cdf_exit(law: ExitLaw, uniforms: np.ndarray, iters: int = 64) -> np.ndarray:
    """Exit times with P[tau > x] = U, by bisection on log x."""
    target = np.log(uniforms)
    lam = law.basis.lambda_1
    lo = np.full_like(target, math.log(1e-6 / lam))
    hi = np.log((60.0 - target) / lam)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = law.log_survival(np.exp(mid)) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return np.exp(0.5 * (lo + hi))


def conditional_tail(
    process, basis: SpectralBasis, z, t: float, cfg: SimConfig, outer: str = "inverse_cdf"
) -> TailEstimate:
    """Rao-Blackwellised estimate: average P_0[eta_(-u,v) > t] over sampled exit times.

    ``outer`` chooses how the outer exit times are drawn: ``"inverse_cdf"``
    inverts the exact survival function, ``"simulate"`` uses
    :func:`sample_bm_exit` with ``cfg.dt``.
    """
    process = _check_process(process)
    if outer not in ("inverse_cdf", "simulate"):
        raise ValueError("outer must be 'inverse_cdf' or 'simulate'")
    law = ExitLaw(basis, z)

    def draw(rng, size):
        if outer == "simulate":
            return sample_bm_exit(basis.domain, z, cfg, rng, size).times
        return inverse_cdf_exit(law, 1.0 - rng.random(size))

    def block(rng, size):
        u = draw(rng, size)
        v = u if process == "btbm" else draw(rng, size)
        return _block_stats(np.exp(eta_survival(u, v, t)))

    n, mean, m2 = _merge(_run_blocks(block, cfg))
    return TailEstimate(float(t), mean, math.sqrt(m2 / (n - 1) / n), n, "conditional", process,
                        cfg.dt if outer == "simulate" else 0.0, cfg.seed)


def estimate_tail(process, basis: SpectralBasis, z, t: float, cfg: SimConfig) -> TailEstimate:
    """Dispatch on ``cfg.estimator``."""
    if cfg.estimator == "direct":
        return direct_tail(process, basis.domain, z, t, cfg)
    return conditional_tail(process, basis, z, t, cfg)
