"""Scalar special functions: standard normal, relative entropy, Poisson cdf and inverses."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .errors import DomainError, InfiniteDivergenceError, SingularInputError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_MAX_ITER = 200


@dataclass(frozen=True)
class EntropyPair:
    """Arguments of the binary relative entropy D(p||q)."""

    p: float
    q: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.q <= 1.0):
            raise DomainError(f"probabilities required, got p={self.p}, q={self.q}")

    @property
    def finite(self) -> bool:
        return not ((self.p > 0 and self.q == 0) or (self.p < 1 and self.q == 1))


@dataclass(frozen=True)
class InverseSolve:
    """Result of a one-dimensional inverse solve.

    Attributes:
        value: The solution.
        residual: Relative residual of the defining equation at ``value``.
        iterations: Number of solver iterations (0 for closed forms).
    """

    value: float
    residual: float
    iterations: int


# -- standard normal ---------------------------------------------------------

def std_normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def std_normal_cdf(x: float) -> float:
    """Phi(x), accurate in relative terms in the lower tail."""
    return 0.5 * math.erfc(-x / _SQRT2)


# Acklam's rational approximation, relative error about 1.15e-9 before polishing.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
            ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    if p > 1.0 - _P_LOW:
        return -_acklam(1.0 - p)
    q = p - 0.5
    r = q * q
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
        (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)


def std_normal_quantile(p: float) -> float:
    """Inverse of Phi on (0, 1).

    Rational approximation followed by one Halley step against ``std_normal_cdf``.
    The upper half is obtained by symmetry so both tails are polished against a
    small (accurately representable) probability.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"quantile requires 0 < p < 1, got {p}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -std_normal_quantile(1.0 - p)
    x = _acklam(p)
    e = std_normal_cdf(x) - p
    u = e / std_normal_pdf(x)
    return x - u / (1.0 + 0.5 * x * u)


def psi(delta: float) -> float:
    """phi(Phi^-1(delta)) / (delta * Phi^-1(delta)); singular at delta = 1/2."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"psi requires 0 < delta < 1, got {delta}")
    q = std_normal_quantile(delta)
    if q == 0.0:
        raise SingularInputError("psi is singular at delta = 1/2")
    return std_normal_pdf(q) / (delta * q)


def psi_times_quantile(delta: float) -> float:
    """The product Phi^-1(delta) * psi(delta) = phi(Phi^-1(delta)) / delta."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"requires 0 < delta < 1, got {delta}")
    return std_normal_pdf(std_normal_quantile(delta)) / delta


def psi_inverse(y: float) -> float:
    """The delta in (1/2, 1) with psi(delta) = y, for y > 0."""
    if not y > 0:
        raise DomainError(f"psi_inverse requires y > 0, got {y}")
    # psi decreases from +inf to 0 on (1/2, 1); work in the quantile variable.
    f = lambda x: std_normal_pdf(x) / (std_normal_cdf(x) * x) - y
    hi = 1.0
    while f(hi) > 0:
        hi *= 2.0
    lo = hi / 2.0
    while f(lo) < 0:
        lo /= 2.0
    return std_normal_cdf(brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))


# -- relative entropy and Poisson -------------------------------------------

def rel_entropy(p: float, q: float) -> float:
    """Binary relative entropy D(p||q) with the 0 log 0 = 0 convention."""
    pair = EntropyPair(p, q)
    if not pair.finite:
        raise InfiniteDivergenceError(f"D({p}||{q}) is infinite")
    if p == q:
        return 0.0
    first = 0.0 if p == 0 else p * math.log(p / q)
    second = 0.0 if p == 1 else (1.0 - p) * (math.log1p(-p) - math.log1p(-q))
    return max(first + second, 0.0)


def pois_cdf(k: int, x: float) -> float:
    """exp(-x) * sum_{j<=k} x^j / j!."""
    if k < 0 or x < 0:
        raise DomainError(f"pois_cdf requires k >= 0 and x >= 0, got k={k}, x={x}")
    if x == 0:
        return 1.0
    j = np.arange(k + 1)
    logs = j * math.log(x) - np.array([math.lgamma(i + 1) for i in range(k + 1)]) - x
    return float(min(1.0, math.exp(logsumexp(logs))))


# -- inverse solves ----------------------------------------------------------

def _solve(f: Callable[[float], float], lo: float, hi: float, target: float) -> InverseSolve:
    root, info = brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                        maxiter=_MAX_ITER, full_output=True)
    scale = abs(target) if target != 0 else 1.0
    return InverseSolve(root, f(root) / scale, info.iterations)


def t_pois(k: int, delta: float) -> InverseSolve:
    """The t > 0 with Pois(k, t) = delta."""
    if k < 0 or not 0.0 < delta < 1.0:
        raise DomainError(f"t_pois requires k >= 0 and 0 < delta < 1, got k={k}, delta={delta}")
    if k == 0:
        t = -math.log(delta)
        return InverseSolve(t, (pois_cdf(0, t) - delta) / delta, 0)
    hi = float(k + 1)
    while pois_cdf(k, hi) >= delta:
        hi *= 2.0
    return _solve(lambda t: pois_cdf(k, t) - delta, 0.0, hi, delta)


def t_div(gamma: float, x: float) -> InverseSolve:
    """The t >= gamma/x with t * D(gamma/t || x) = 1."""
    if gamma < 0 or not 0.0 < x < 1.0:
        raise DomainError(f"t_div requires gamma >= 0 and 0 < x < 1, got {gamma}, {x}")
    if gamma == 0:
        t = -1.0 / math.log1p(-x)
        return InverseSolve(t, t * rel_entropy(0.0, x) - 1.0, 0)
    lo = gamma / x
    f = lambda t: t * rel_entropy(min(gamma / t, x), x) - 1.0
    hi = 2.0 * lo
    while f(hi) <= 0:
        hi *= 2.0
    return _solve(f, lo, hi, 1.0)


def eps_div(s: float, r: float) -> float:
    """The eps in [s, 1) with D(s||eps) = r."""
    if not 0.0 <= s < 1.0 or not r > 0:
        raise DomainError(f"eps_div requires 0 <= s < 1 and r > 0, got s={s}, r={r}")
    return eps_div_solve(s, r).value


def eps_div_solve(s: float, r: float) -> InverseSolve:
    if s == 0:
        eps = -math.expm1(-r)
        return InverseSolve(eps, (rel_entropy(0.0, eps) - r) / r, 0)
    # Solve in u = -ln(1 - eps) so that eps close to 1 keeps full precision.
    log_s, log_1ms = math.log(s), math.log1p(-s)
    f = lambda u: s * (log_s - math.log(-math.expm1(-u))) + (1.0 - s) * (log_1ms + u) - r
    lo = -log_1ms
    hi = lo + r / (1.0 - s) + 1.0
    while f(hi) <= 0:
        hi *= 2.0
    sol = _solve(f, lo, hi, r)
    # 1 - eps can lie below double resolution; report the largest double under 1.
    eps = min(-math.expm1(-sol.value), math.nextafter(1.0, 0.0))
    return InverseSolve(eps, sol.residual, sol.iterations)


def s_div(eps: float, r: float) -> float:
    """The s in [0, eps] with D(s||eps) = r."""
    return s_div_solve(eps, r).value


def s_div_solve(eps: float, r: float) -> InverseSolve:
    if not 0.0 < eps < 1.0 or not r > 0:
        raise DomainError(f"s_div requires 0 < eps < 1 and r > 0, got eps={eps}, r={r}")
    top = -math.log1p(-eps)
    if r > top * (1 + 1e-15):
        raise DomainError(f"s_div requires r <= -ln(1-eps) = {top}, got {r}")
    if r >= top:
        return InverseSolve(0.0, 0.0, 0)
    return _solve(lambda s: rel_entropy(s, eps) - r, 0.0, eps, r)
