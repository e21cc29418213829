"""Limiting detection probabilities under iid truth near the target threshold.

The target is eps = theta0 + e / sqrt(n) and the truth is iid with failure
rate theta0 + t / sqrt(n); everything here is the n -> infinity limit, with the
O(1/sqrt(n)) corrections dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .asymptotics import coeff_C
from .errors import DomainError
from .special import psi, std_normal_cdf, std_normal_quantile

_EDGE = 1e-12


@dataclass(frozen=True)
class DetectionSetting:
    theta0: float
    e: float
    t: float
    delta: float
    lam: float = 0.0
    p0: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.theta0 < 1.0:
            raise DomainError(f"need 0 < theta0 < 1, got {self.theta0}")
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"need 0 < delta < 1, got {self.delta}")
        if not 0.0 <= self.lam < 1.0:
            raise DomainError(f"need 0 <= lambda < 1, got {self.lam}")
        if self.p0 is not None and not 0.0 < self.p0 < 1.0:
            raise DomainError(f"need 0 < p0 < 1, got {self.p0}")

    @property
    def gap(self) -> float:
        return self.e - self.t


@dataclass(frozen=True)
class CubicCoefficients:
    alpha: float
    beta: float
    gamma: float

    @classmethod
    def from_params(cls, theta0: float, gap: float, delta: float) -> "CubicCoefficients":
        q = std_normal_quantile(delta)
        return cls(q, -q * psi(delta) * (1 - theta0), gap / math.sqrt(theta0))


def _scale(theta0: float, lam: float) -> float:
    nu = 1.0 - lam
    return math.sqrt(nu) / math.sqrt(theta0 * (1 - theta0 * nu))


def detect_threshold(setting: DetectionSetting, mode: str) -> float:
    """Standardized acceptance threshold; the detection probability is Phi of it."""
    th, gap, delta = setting.theta0, setting.gap, setting.delta
    if mode == "iid":
        return gap / math.sqrt(th * (1 - th)) + std_normal_quantile(delta)
    if mode == "randomized":
        if setting.lam <= 0.0:
            raise DomainError("randomized mode needs lambda > 0")
        return _scale(th, setting.lam) * (gap - coeff_C(setting.lam, th, delta))
    if mode == "deterministic-lambda0":
        return -math.inf
    raise DomainError(f"unknown mode {mode!r}")


def detect_prob(setting: DetectionSetting, mode: str) -> float:
    x = detect_threshold(setting, mode)
    return 0.0 if x == -math.inf else std_normal_cdf(x)


def required_gap(theta0: float, delta: float, lam: float, p0: float) -> float:
    """Smallest e - t giving limiting detection probability p0 for the randomized test."""
    DetectionSetting(theta0, 0.0, 0.0, delta, lam, p0)
    if lam <= 0.0:
        raise DomainError("required_gap needs lambda > 0")
    return coeff_C(lam, theta0, delta) + std_normal_quantile(p0) / _scale(theta0, lam)


def kappa(lam: float, theta0: float, gap: float, delta: float) -> float:
    """The randomized threshold written as a function of lam."""
    c = CubicCoefficients.from_params(theta0, gap, delta)
    num = c.alpha * math.sqrt(lam) + c.beta * (1 - lam) / math.sqrt(lam) + c.gamma * math.sqrt(1 - lam)
    return num / math.sqrt(1 - theta0 * (1 - lam))


def cubic_residual(lam: float, theta0: float, gap: float, delta: float) -> float:
    """(gap^2/theta0) lam^3 - (1-lam) (q (1-theta0))^2 ((1+(1+theta0) psi) lam + (1-theta0) psi)^2.

    Negative at 0, positive at 1, with a single root in between for delta < 1/2.
    """
    q = std_normal_quantile(delta)
    p = psi(delta)
    inner = (1 + (1 + theta0) * p) * lam + (1 - theta0) * p
    return gap * gap / theta0 * lam ** 3 - (1 - lam) * (q * (1 - theta0)) ** 2 * inner ** 2


def optimal_lambda_detection(theta0: float, gap: float, delta: float) -> tuple[float, float]:
    """The lam maximizing the randomized detection threshold, with the threshold there.

    At gap = 0 the supremum is approached as lam -> 1; (1.0, Phi^-1(delta)) is returned.
    """
    if not 0.0 < delta < 0.5:
        raise DomainError(f"need 0 < delta < 1/2, got {delta}")
    if not 0.0 < theta0 < 1.0:
        raise DomainError(f"need 0 < theta0 < 1, got {theta0}")
    if gap < 0:
        raise DomainError(f"need gap >= 0, got {gap}")
    if gap == 0:
        return 1.0, std_normal_quantile(delta)
    f = lambda x: cubic_residual(x, theta0, gap, delta)
    lam0 = brentq(f, _EDGE, 1 - _EDGE, xtol=1e-16, rtol=8.9e-16, maxiter=200)
    return lam0, kappa(lam0, theta0, gap, delta)


def cubic_root_count(theta0: float, gap: float, delta: float, grid: int = 20000) -> int:
    """Number of sign changes of the cubic on a fine grid of (0, 1)."""
    prev = cubic_residual(_EDGE, theta0, gap, delta)
    count = 0
    for i in range(1, grid + 1):
        x = min(1 - _EDGE, i / grid)
        cur = cubic_residual(x, theta0, gap, delta)
        if (prev < 0) != (cur < 0):
            count += 1
        prev = cur
    return count
