"""Exact upper confidence limits by the region method, plus closed forms and bounds.

The achievable pairs (acceptance probability, joint probability of acceptance and
a success in the held-out slot) form the convex hull of n + 2 points
``(h_z, g_z)``. The confidence limit is read off the lower boundary of that
polygon at abscissa ``delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .binomial import log_binom_cdf, log_tail, tail, z_star
from .errors import DomainError

_LOG0 = -math.inf


@dataclass(frozen=True)
class TestDesign:
    """A randomized test instance.

    ``n`` observations, acceptance when at most ``l`` post-channel failures are
    seen, significance level ``delta`` and randomization parameter ``lam``
    (each observed failure is reported as a success with probability ``lam``).
    For levels too small to represent, pass ``log_delta`` and leave ``delta``
    at its underflowed value.
    """

    __test__ = False

    n: int
    l: int
    delta: float
    lam: float = 0.0
    log_delta: float | None = None

    def __post_init__(self) -> None:
        if self.n < 1 or self.l < 0:
            raise DomainError(f"need n >= 1 and l >= 0, got n={self.n}, l={self.l}")
        if self.n < self.l + 1:
            raise DomainError(f"need n >= l + 1, got n={self.n}, l={self.l}")
        if self.log_delta is None:
            if not 0.0 < self.delta <= 1.0:
                raise DomainError(f"need 0 < delta <= 1, got {self.delta}")
        elif not self.log_delta <= 0.0:
            raise DomainError(f"need log_delta <= 0, got {self.log_delta}")
        if not 0.0 <= self.lam < 1.0:
            raise DomainError(f"need 0 <= lambda < 1, got {self.lam}")

    @property
    def ln_delta(self) -> float:
        return math.log(self.delta) if self.log_delta is None else self.log_delta

    @property
    def nu(self) -> float:
        return 1.0 - self.lam


@dataclass(frozen=True)
class RegionPoint:
    z: int
    h: float
    g: float


@dataclass(frozen=True)
class ConfidenceBound:
    """A confidence limit with its complement and provenance tag.

    ``method`` is one of ``region-exact``, ``closed-form-lambda0``,
    ``iid-bisection``, ``oracle-lp`` or ``asymptotic``.
    """

    epsilon_bar: float
    complement: float
    method: str
    z_hat: int | None = None
    mixture: object | None = field(default=None, compare=False)


def _bound(eps: float, method: str, z_hat: int | None = None) -> ConfidenceBound:
    eps = min(1.0, max(0.0, eps))
    return ConfidenceBound(eps, 1.0 - eps, method, z_hat)


def _B(z: int, l: int, lam: float) -> float:
    if lam == 0.0:
        return 1.0 if l >= z else 0.0
    return tail(z, l, lam)


def region_point(z: int, l: int, n: int, lam: float) -> RegionPoint:
    """The vertex (h_z, g_z); the formulas are evaluated literally for any z >= 0."""
    if z <= l:
        return RegionPoint(z, 1.0, (n - z + 1) / (n + 1))
    bz = _B(z, l, lam)
    h = ((n - z + 1) * bz + z * _B(z - 1, l, lam)) / (n + 1)
    return RegionPoint(z, h, (n - z + 1) * bz / (n + 1))


def region_points(design: TestDesign) -> list[RegionPoint]:
    """All n + 2 vertices of the achievable region, z = 0..n+1."""
    n, l, lam = design.n, design.l, design.lam
    return [region_point(z, l, n, lam) for z in range(n + 2)]


def _log_hg(z: int, l: int, n: int, lam: float) -> tuple[float, float]:
    """log h_z and log g_z for 0 <= z <= n + 1, lam > 0."""
    if z <= l:
        return 0.0, math.log(n - z + 1) - math.log(n + 1)
    lb = log_tail(z, l, lam)
    lb1 = log_tail(z - 1, l, lam)
    a = math.log(n - z + 1) + lb if z <= n else _LOG0
    b = math.log(z) + lb1
    hi, lo = (a, b) if a > b else (b, a)
    log_h = hi + math.log1p(math.exp(lo - hi)) - math.log(n + 1)
    return log_h, a - math.log(n + 1)


def _ucl_lambda0(l: int, n: int, delta: float) -> float:
    if delta < (l + 1) / (n + 1):
        return 1.0
    return ((l + 1) * (n + 1 - l) - delta * (n + 1)) / (delta * (n - l) * (n + 1))


def ucl_exact(design: TestDesign) -> ConfidenceBound:
    """Exact upper confidence limit for the randomized test ``design``."""
    n, l, lam = design.n, design.l, design.lam
    if lam == 0.0:
        delta = math.exp(design.ln_delta)
        return _bound(_ucl_lambda0(l, n, delta), "closed-form-lambda0")
    log_delta = design.ln_delta
    if log_delta <= log_tail(n, l, lam):
        return ConfidenceBound(1.0, 0.0, "region-exact", n + 1)
    zs = z_star(l, 0.0, lam, log_delta=log_delta).z_star_upper
    # h_z >= delta for z < z*, h_z < delta for z > z*; only z* itself is undecided.
    z_hat = zs
    if zs > l:
        log_h, _ = _log_hg(zs, l, n, lam)
        if log_h < log_delta:
            z_hat = zs - 1
    lh0, lg0 = _log_hg(z_hat, l, n, lam)
    lh1, lg1 = _log_hg(z_hat + 1, l, n, lam)
    # Scale every coordinate by delta; the scaled values stay moderate.
    h0 = math.exp(lh0 - log_delta)
    h1 = math.exp(lh1 - log_delta)
    g0 = math.exp(lg0 - log_delta)
    g1 = math.exp(lg1 - log_delta)
    kappa = (1.0 - h1) / (h0 - h1)
    comp = (1.0 - kappa) * g1 + kappa * g0
    return _bound(1.0 - comp, "region-exact", z_hat)


def ucl_lambda0(l: int, n: int, delta: float) -> float:
    """Closed-form limit of the deterministic test (lam = 0)."""
    TestDesign(n, l, delta, 0.0)
    return _ucl_lambda0(l, n, delta)


def ucl_iid_exact(k: int, n: int, delta: float, *, log_delta: float | None = None) -> ConfidenceBound:
    """max{theta : B_{n,k}(theta) >= delta}, the iid upper confidence limit."""
    if not 0 <= k < n:
        raise DomainError(f"need 0 <= k < n, got k={k}, n={n}")
    if log_delta is None:
        if not 0.0 < delta <= 1.0:
            raise DomainError(f"need 0 < delta <= 1, got {delta}")
        log_delta = math.log(delta)
    if log_delta >= 0.0:
        return ConfidenceBound(0.0, 1.0, "iid-bisection")

    def f(theta: float) -> float:
        return log_binom_cdf(n, k, theta) - log_delta

    hi = 1.0
    if f(hi) >= 0:
        return ConfidenceBound(1.0, 0.0, "iid-bisection")
    # log B_{n,k}(theta) is finite and decreasing on [0, 1); bracket below 1.
    hi = 0.5
    while f(hi) >= 0:
        hi = 1.0 - (1.0 - hi) / 2.0
        if hi == 1.0:
            return ConfidenceBound(1.0, 0.0, "iid-bisection")
    lo = 0.0
    theta = brentq(f, lo, hi, xtol=1e-17, rtol=8.9e-16, maxiter=200)
    return _bound(theta, "iid-bisection")


def delta_z_schedule(n: int, lam: float, z: int) -> tuple[float, float]:
    """The level delta_z at which the vertex z is worst case, and the limit there."""
    if not 0 <= z <= n + 1:
        raise DomainError(f"need 0 <= z <= n + 1, got z={z}")
    if not 0.0 < lam < 1.0:
        raise DomainError(f"need 0 < lambda < 1, got {lam}")
    d = ((n + 1 - z) * lam ** z + (z * lam ** (z - 1) if z > 0 else 0.0)) / (n + 1)
    return d, z / (z + (n - z + 1) * lam)


def ucl_sandwich(design: TestDesign) -> tuple[float, float]:
    """Analytic lower and upper bounds on the complement 1 - epsilon_bar."""
    n, l, lam, delta = design.n, design.l, design.lam, design.delta
    if not 0.0 < lam < 1.0:
        raise DomainError(f"need 0 < lambda < 1, got {lam}")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"need 0 < delta < 1, got {delta}")
    ci = z_star(l, delta, lam)
    zu, zl = ci.z_star_upper, ci.z_star_lower

    p = region_point(zu + 1, l, n, lam)
    lower = [p.g / p.h, lam * (n - zu) / (lam * (n - zu) + zu + 1)]
    if delta <= 0.5:
        lower.append(lam * (n - zu) / (lam * (n - zu) + zu - l + 1 + math.sqrt(lam * l)))

    q = region_point(zl, l, n, lam)
    m = lam * (n - zl + 1)
    upper = [max(0.0, q.g / q.h), max(0.0, m / (m + zl - l))]
    return min(1.0, max(0.0, max(lower))), min(1.0, max(0.0, min(upper)))
