"""Dirichlet spectral data of bounded domains and the Brownian exit-time law.

Eigenvalues are those of ``(1/2) Laplacian`` (the generator of standard
Brownian motion), *not* of the Laplacian itself: on ``(0, L)`` the first one
is ``pi**2 / (2 L**2)``.  Off-by-two here is the easiest mistake to make.

For a start point ``z`` the exit time ``tau`` has

    P_z[tau > t] = sum_k exp(-lambda_k t) a_k(z),    a_k(z) = psi_k(z) int_D psi_k,
    f(t)         = sum_k lambda_k exp(-lambda_k t) a_k(z).
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .special import BesselError, bessel_j, bessel_zeros

log = logging.getLogger(__name__)

DEFAULT_K = 64
DEFAULT_DISK_K = 32
SMALL_TIME = 0.05  # series used only for t * lambda_1 >= SMALL_TIME
MAX_DISK_RADIAL = 2000
MAX_DISK_ORDER = 200


class DomainError(ValueError):
    pass


class SmallTimeError(ValueError):
    """The eigen-series is not trusted below ``t * lambda_1 = SMALL_TIME``."""


class SmallTimeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"interval needs a < b, got ({self.a}, {self.b})")

    dim = 1

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, z) -> bool:
        z = _as_point(z, 1)[0]
        return self.a < z < self.b

    def to_json(self) -> dict:
        return {"type": "interval", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Rectangle:
    """The box ``[0, s_1] x ... x [0, s_n]``."""

    sides: tuple

    def __post_init__(self):
        sides = tuple(float(s) for s in self.sides)
        if not sides or any(s <= 0 for s in sides):
            raise DomainError(f"rectangle sides must be positive, got {self.sides}")
        object.__setattr__(self, "sides", sides)

    @property
    def dim(self) -> int:
        return len(self.sides)

    def contains(self, z) -> bool:
        z = _as_point(z, self.dim)
        return all(0 < zi < s for zi, s in zip(z, self.sides))

    def to_json(self) -> dict:
        return {"type": "rectangle", "sides": list(self.sides)}


@dataclass(frozen=True)
class Disk:
    """Disk of the given radius centred at the origin of the plane."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"disk radius must be positive, got {self.radius}")

    dim = 2

    def contains(self, z) -> bool:
        z = _as_point(z, 2)
        return math.hypot(*z) < self.radius

    def to_json(self) -> dict:
        return {"type": "disk", "radius": self.radius}


DomainSpec = Union[Interval, Rectangle, Disk]


def _as_point(z, dim):
    arr = np.atleast_1d(np.asarray(z, dtype=float)).ravel()
    if arr.size != dim:
        raise DomainError(f"point {z!r} does not have dimension {dim}")
    return arr


def domain_from_json(obj: dict) -> DomainSpec:
    kind = str(obj.get("type", "")).lower()
    try:
        if kind == "interval":
            return Interval(float(obj["a"]), float(obj["b"]))
        if kind == "rectangle":
            return Rectangle(tuple(obj["sides"]))
        if kind == "disk":
            return Disk(float(obj["radius"]))
    except KeyError as exc:
        raise DomainError(f"domain {obj!r} is missing field {exc}") from None
    raise DomainError(f"unsupported domain type {kind!r}")


def parse_domain(text: str) -> DomainSpec:
    """Parse ``interval:a,b``, ``rectangle:s1,s2[,...]``, ``disk:R`` or a JSON object."""
    import json

    text = text.strip()
    if text.startswith("{"):
        return domain_from_json(json.loads(text))
    kind, _, rest = text.partition(":")
    nums = [float(v) for v in rest.split(",") if v.strip()]
    kind = kind.lower()
    if kind == "interval" and len(nums) == 2:
        return Interval(*nums)
    if kind in ("rectangle", "square", "box") and nums:
        return Rectangle(tuple(nums))
    if kind == "disk" and len(nums) == 1:
        return Disk(nums[0])
    raise DomainError(f"cannot parse domain {text!r}")


def default_point(domain: DomainSpec):
    """Centre of the domain."""
    if isinstance(domain, Interval):
        return 0.5 * (domain.a + domain.b)
    if isinstance(domain, Rectangle):
        return tuple(0.5 * s for s in domain.sides)
    return (0.0, 0.0)


def ground_eigenvalue(domain: DomainSpec) -> float:
    """Principal Dirichlet eigenvalue of Laplacian / 2 on ``domain``."""
    if isinstance(domain, Interval):
        return math.pi**2 / (2 * domain.length**2)
    if isinstance(domain, Rectangle):
        return sum(math.pi**2 / (2 * s * s) for s in domain.sides)
    if isinstance(domain, Disk):
        return bessel_zeros(0, 1)[0] ** 2 / (2 * domain.radius**2)
    raise DomainError(f"unsupported domain {domain!r}")


# -- one-dimensional building blocks ------------------------------------------------


def _interval_modes(length: float, k_max: int):
    k = np.arange(1, k_max + 1)
    lam = (k * math.pi / length) ** 2 / 2.0
    return k, lam


def _interval_coeff(k, x_rel):
    """a_k for (0, 1) at relative position x_rel: 2 (1 - (-1)^k) / (k pi) sin(k pi x)."""
    odd = (k % 2 == 1).astype(float)
    return 4.0 * odd / (k * math.pi) * np.sin(k * math.pi * x_rel)


@dataclass(frozen=True)
class SpectralBasis:
    """Truncated Dirichlet eigendata of a domain.

    ``eigenvalues`` are ascending.  ``modes`` identifies each eigenpair:
    integer index tuples for intervals/rectangles, ``(m, i, zero)`` for the
    disk (Bessel order, zero index, zero value).
    """

    domain: DomainSpec
    eigenvalues: np.ndarray
    modes: tuple = field(repr=False)

    @property
    def K(self) -> int:
        return len(self.eigenvalues)

    @property
    def lambda_1(self) -> float:
        return float(self.eigenvalues[0])

    def coeff(self, z) -> np.ndarray:
        """``a_k(z) = psi_k(z) int_D psi_k`` for every retained mode."""
        dom = self.domain
        if not dom.contains(z):
            raise DomainError(f"point {z!r} is not inside {dom}")
        if isinstance(dom, Interval):
            k = np.array([m[0] for m in self.modes])
            return _interval_coeff(k, (float(_as_point(z, 1)[0]) - dom.a) / dom.length)
        if isinstance(dom, Rectangle):
            zz = _as_point(z, dom.dim)
            idx = np.array(self.modes)
            out = np.ones(len(idx))
            for d, side in enumerate(dom.sides):
                out *= _interval_coeff(idx[:, d], zz[d] / side)
            return out
        zz = _as_point(z, 2)
        r = math.hypot(*zz) / dom.radius
        out = np.zeros(self.K)
        radial = [n for n, m in enumerate(self.modes) if m[0] == 0]
        if radial:
            j = np.array([self.modes[n][2] for n in radial])
            # a = 2 J0(j r) / (j J1(j)); angular modes integrate to zero
            out[radial] = 2.0 * bessel_j(0, j * r) / (j * bessel_j(1, j))
        return out

    def weyl_constant(self) -> float:
        """min_k lambda_k / k^(2/n); positive and bounded away from 0 under Weyl growth."""
        k = np.arange(1, self.K + 1)
        return float(np.min(self.eigenvalues / k ** (2.0 / self.domain.dim)))

    def to_csv_rows(self, z):
        a = self.coeff(z)
        return [(k + 1, float(lam), float(c)) for k, (lam, c) in enumerate(zip(self.eigenvalues, a))]


def build_basis(domain: DomainSpec, K: int | None = None, *, angular: bool = False) -> SpectralBasis:
    """Closed-form Dirichlet eigendata for ``domain`` truncated at ``K`` modes.

    For the disk, ``K`` counts radial (m = 0) modes, the only ones with a
    nonzero coefficient.  With ``angular=True`` the basis instead holds the
    ``K`` lowest modes of every order, each m >= 1 order counted twice
    (cosine and sine), with zero coefficients for m >= 1.
    """
    if isinstance(domain, Interval):
        K = DEFAULT_K if K is None else K
        _check_k(K)
        k, lam = _interval_modes(domain.length, K)
        return SpectralBasis(domain, lam, tuple((int(i),) for i in k))
    if isinstance(domain, Rectangle):
        K = DEFAULT_K if K is None else K
        _check_k(K)
        per_dim = [_interval_modes(s, K)[1] for s in domain.sides]
        cands = []
        for idx in itertools.product(range(K), repeat=domain.dim):
            cands.append((sum(per_dim[d][i] for d, i in enumerate(idx)), tuple(i + 1 for i in idx)))
        cands.sort()
        cands = cands[:K]
        return SpectralBasis(domain, np.array([c[0] for c in cands]), tuple(c[1] for c in cands))
    if isinstance(domain, Disk):
        K = DEFAULT_DISK_K if K is None else K
        _check_k(K)
        return _disk_basis(domain, K, angular)
    raise DomainError(f"unsupported domain {domain!r}")


def _check_k(K):
    if K < 1:
        raise ValueError(f"truncation order must be >= 1, got {K}")


def _disk_basis(domain: Disk, K: int, angular: bool) -> SpectralBasis:
    if K > MAX_DISK_RADIAL:
        raise BesselError(f"K={K} exceeds the Bessel-zero table growth limit {MAX_DISK_RADIAL}")
    scale = 1.0 / (2.0 * domain.radius**2)
    if not angular:
        j = bessel_zeros(0, K)
        return SpectralBasis(domain, j * j * scale, tuple((0, i + 1, float(z)) for i, z in enumerate(j)))
    # K lowest modes overall: order m contributes zeros j_{m,i}; a zero of J_m with
    # m >= 1 is a double eigenvalue.
    j0 = bessel_zeros(0, K)
    cutoff = float(j0[-1])
    modes = [(float(z), 0, i + 1) for i, z in enumerate(j0)]
    m = 1
    while True:
        if m > MAX_DISK_ORDER:
            raise BesselError("angular order exceeds the supported maximum")
        # the first zero of J_m exceeds m, so orders beyond the cutoff contribute nothing
        if m >= cutoff:
            break
        count = 0
        zs = bessel_zeros(m, max(1, int((cutoff - m) / math.pi) + 2))
        for i, z in enumerate(zs):
            if z <= cutoff:
                modes.extend([(float(z), m, i + 1)] * 2)
                count += 1
        if count == 0:
            break
        m += 1
    modes.sort(key=lambda t: (t[0], t[1], t[2]))
    modes = modes[:K]
    lam = np.array([z * z * scale for z, _, _ in modes])
    return SpectralBasis(domain, lam, tuple((mm, i, z) for z, mm, i in modes))


# -- exit-time law -------------------------------------------------------------------


def series_tail_bound(basis: SpectralBasis, t) -> np.ndarray:
    """Rough bound on the truncated part of the survival series at time ``t``.

    Uses the last retained eigenvalue and |a_k| <= 1 per mode.
    """
    t = np.asarray(t, dtype=float)
    lam_k = basis.eigenvalues[-1]
    gap = max(basis.eigenvalues[-1] - basis.eigenvalues[max(basis.K - 2, 0)], basis.lambda_1)
    with np.errstate(over="ignore", divide="ignore"):
        return np.exp(-lam_k * t) / -np.expm1(-gap * np.maximum(t, 1e-300))


def _check_time(basis, t):
    if np.any(t < 0):
        raise ValueError("time must be nonnegative")
    small = (t > 0) & (t * basis.lambda_1 < SMALL_TIME)
    if np.any(small):
        raise SmallTimeError(
            f"t*lambda_1 = {float(np.min(t[small])) * basis.lambda_1:.3g} below {SMALL_TIME}; "
            "the eigen-series is not used in the small-time regime"
        )


def _log_series(weights, basis, t):
    """log sum_k weights_k exp(-lambda_k t) with the ground state factored out."""
    lam = basis.eigenvalues
    shifted = np.exp(-np.outer(t, lam - lam[0]))
    total = shifted @ weights
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(total > 0, np.log(total) - lam[0] * t, -np.inf)


def tau_survival(basis: SpectralBasis, z, t):
    """log P_z[tau_D > t] from the truncated eigen-series.

    Refuses ``0 < t < SMALL_TIME / lambda_1``.  If the series overshoots 1 by
    more than 1e-10 a :class:`SmallTimeWarning` is issued before clamping.
    """
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    _check_time(basis, t)
    a = basis.coeff(z)
    out = _log_series(a, basis, t)
    out[t == 0] = 0.0
    if np.any(out > 1e-10):
        warnings.warn(
            f"survival series exceeds 1 (max log {float(np.max(out)):.3e}); clamped", SmallTimeWarning
        )
    out = np.minimum(out, 0.0)
    if log.isEnabledFor(logging.DEBUG):
        log.debug("tau_survival truncation bound %s", series_tail_bound(basis, t[t > 0]))
    return float(out[0]) if scalar else out


def tau_log_density(basis: SpectralBasis, z, t):
    """log f(t) with f the exit-time density, for ``t * lambda_1 >= SMALL_TIME``."""
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t <= 0):
        raise SmallTimeError("the density series needs t > 0")
    _check_time(basis, t)
    a = basis.coeff(z)
    out = _log_series(a * basis.eigenvalues, basis, t)
    if log.isEnabledFor(logging.DEBUG):
        log.debug("tau_density truncation bound %s", basis.eigenvalues[-1] * series_tail_bound(basis, t))
    return float(out[0]) if scalar else out


def tau_density(basis: SpectralBasis, z, t):
    """Exit-time density f(t) in units of 1/time."""
    return np.exp(tau_log_density(basis, z, t))
