"""Binomial pmf/cdf, the difference Delta, the critical index z* and tail bounds.

Throughout, ``B(z, l)`` at the randomization parameter ``lam`` means the
binomial cdf ``B_{z,l}(nu)`` with ``nu = 1 - lam``. Internally the success and
failure probabilities are carried as separate logarithms so that ``lam`` close
to 0 or 1 does not lose precision through ``1 - (1 - lam)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betaln, logsumexp

from .errors import DomainError
from .special import rel_entropy, std_normal_cdf

_DIRECT_MAX_Z = 50
_HORNER_MAX_L = 64
_EXACT_COMB_MAX_Z = 2000


@dataclass(frozen=True)
class TailQuery:
    z: int
    l: int
    p: float

    def __post_init__(self) -> None:
        if self.z < 0 or self.l < 0:
            raise DomainError(f"z and l must be nonnegative, got z={self.z}, l={self.l}")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class CriticalIndex:
    """z* = min{z >= l : B_{z,l}(nu) <= delta} and z_* = z* - 1."""

    z_star_upper: int
    z_star_lower: int


def _log1pexp(x: float) -> float:
    return x + math.log1p(math.exp(-x)) if x > 0 else math.log1p(math.exp(x))


def _log_comb(z: int, j: int) -> float:
    if z <= _EXACT_COMB_MAX_Z:
        return math.log(math.comb(z, j))
    return -math.log1p(z) - float(betaln(z - j + 1, j + 1))


def _log_pmf(z: int, j: int, log_p: float, log_q: float) -> float:
    """log C(z,j) p^j q^(z-j) for 0 <= j <= z and 0 < p, q."""
    return _log_comb(z, j) + j * log_p + (z - j) * log_q


def _log_cdf(z: int, l: int, log_p: float, log_q: float) -> float:
    """log sum_{j<=l} C(z,j) p^j q^(z-j) for 0 <= l < z and 0 < p, q < 1.

    Above the mean the upper tail is summed instead and the result is
    log1p(-tail), which keeps values near 1 accurate.
    """
    if l >= z * math.exp(log_p):
        return math.log1p(-math.exp(_log_lower_sum(z, z - l - 1, log_q, log_p)))
    return _log_lower_sum(z, l, log_p, log_q)


def _log_lower_sum(z: int, l: int, log_p: float, log_q: float) -> float:
    # Normalized by the last term; the ratios b_{j-1}/b_j are positive so the
    # accumulation involves no cancellation.
    log_top = _log_pmf(z, l, log_p, log_q)
    if l == 0:
        return log_top
    shift = log_q - log_p
    if l <= _HORNER_MAX_L:
        acc = 0.0
        for i in range(1, l + 1):
            acc = _log1pexp(math.log(i) - math.log(z - i + 1) + shift + acc)
        return log_top + acc
    i = np.arange(l, 0, -1, dtype=float)
    c = np.cumsum(np.log(i) - np.log(z - i + 1.0) + shift)
    return log_top + float(logsumexp(np.concatenate(([0.0], c))))


def _check(z: int, j: int, p: float) -> None:
    TailQuery(z, j, p)


def binom_pmf(z: int, j: int, p: float) -> float:
    """C(z,j) p^j (1-p)^(z-j), zero for j > z, with 0^0 = 1."""
    _check(z, j, p)
    if j > z:
        return 0.0
    if p == 0.0:
        return 1.0 if j == 0 else 0.0
    if p == 1.0:
        return 1.0 if j == z else 0.0
    return math.exp(_log_pmf(z, j, math.log(p), math.log1p(-p)))


def binom_cdf(z: int, l: int, p: float) -> float:
    """B_{z,l}(p) = sum_{j<=l} binom_pmf(z, j, p); exactly 1 when l >= z."""
    _check(z, l, p)
    if l >= z or p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0
    if z <= _DIRECT_MAX_Z and 1e-6 <= p <= 1.0 - 1e-6:
        return _direct_cdf(z, l, p, 1.0 - p)
    return math.exp(_log_cdf(z, l, math.log(p), math.log1p(-p)))


def log_binom_cdf(z: int, l: int, p: float) -> float:
    """log B_{z,l}(p), finite even where B_{z,l}(p) underflows."""
    _check(z, l, p)
    if l >= z or p == 0.0:
        return 0.0
    if p == 1.0:
        return -math.inf
    return _log_cdf(z, l, math.log(p), math.log1p(-p))


def _direct_cdf(z: int, l: int, p: float, q: float) -> float:
    if l >= z * p:  # sum the smaller upper tail instead
        return 1.0 - _direct_sum(z, z - l - 1, q, p)
    return _direct_sum(z, l, p, q)


def _direct_sum(z: int, l: int, p: float, q: float) -> float:
    term = q ** z
    total = term
    for j in range(l):
        term *= (z - j) / (j + 1) * p / q
        total += term
    return min(total, 1.0)


@lru_cache(maxsize=1 << 20)
def log_tail(z: int, l: int, lam: float) -> float:
    """log B_{z,l}(1 - lam) for 0 < lam < 1; 0 when l >= z."""
    if l >= z:
        return 0.0
    if z <= _DIRECT_MAX_Z and lam >= 1e-6 and 1.0 - lam >= 1e-6:
        return math.log(_direct_cdf(z, l, 1.0 - lam, lam))
    return _log_cdf(z, l, math.log1p(-lam), math.log(lam))


def tail(z: int, l: int, lam: float) -> float:
    """B_{z,l}(1 - lam) for 0 < lam < 1."""
    return math.exp(log_tail(z, l, lam))


def delta_zl(z: int, l: int, lam: float) -> float:
    """Delta_{z,l} = B_{z,l} - B_{z+1,l} = nu * b_{z,l}(nu)."""
    if z < 0 or l < 0:
        raise DomainError(f"z and l must be nonnegative, got z={z}, l={l}")
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    if l > z:
        return 0.0
    return math.exp(math.log1p(-lam) + _log_pmf(z, l, math.log1p(-lam), math.log(lam)))


def z_star(l: int, delta: float, lam: float, *, log_delta: float | None = None) -> CriticalIndex:
    """Minimal z >= l with B_{z,l}(nu) <= delta.

    Pass ``log_delta`` instead of ``delta`` when delta underflows.
    """
    if l < 0:
        raise DomainError(f"l must be nonnegative, got {l}")
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    if log_delta is None:
        if not 0.0 < delta <= 1.0:
            raise DomainError(f"delta must lie in (0, 1], got {delta}")
        log_delta = math.log(delta)
    elif log_delta > 0:
        raise DomainError(f"log_delta must be <= 0, got {log_delta}")
    zs = _z_star_search(l, log_delta, lam)
    return CriticalIndex(zs, zs - 1)


@lru_cache(maxsize=1 << 18)
def _z_star_search(l: int, log_delta: float, lam: float) -> int:
    if log_delta >= 0.0:
        return l
    step = 1
    lo, hi = l, l + 1
    while log_tail(hi, l, lam) > log_delta:
        lo = hi
        step *= 2
        hi = l + step
    # invariant: B(lo) > delta >= B(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if log_tail(mid, l, lam) > log_delta:
            lo = mid
        else:
            hi = mid
    return hi


def tail_bounds(z: int, l: int, lam: float) -> tuple[float, float, float, float]:
    """Chernoff upper, reverse-Chernoff lower, normal approximation and its error bound.

    Returns ``(chernoff_upper, chernoff_lower, normal_approx, be_error)`` for
    ``B_{z,l}(nu)``. Requires ``1 <= l <= z - 1`` and ``l <= nu * z``.
    """
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    nu = 1.0 - lam
    if not 1 <= l <= z - 1:
        raise DomainError(f"tail bounds require 1 <= l <= z - 1, got l={l}, z={z}")
    if l > nu * z:
        raise DomainError(f"Chernoff bound requires l <= nu z, got l={l}, nu z={nu * z}")
    upper = math.exp(-z * rel_entropy(l / z, nu))
    lower = upper / (math.e * math.sqrt(l))
    sd = math.sqrt(nu * lam * z)
    normal = std_normal_cdf((l - nu * z) / sd)
    return upper, lower, normal, 0.5 / math.sqrt(nu * lam * l)
