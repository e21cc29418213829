"""Large-n expansions of the upper confidence limit and their coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .binomial import delta_zl, tail, z_star
from .errors import DomainError
from .special import (
    eps_div,
    psi,
    psi_inverse,
    psi_times_quantile,
    rel_entropy,
    s_div,
    std_normal_quantile,
    t_div,
    t_pois,
)

KINDS = ("linear-fixed-delta", "linear-exponential-delta",
         "constant-fixed-delta", "constant-exponential-delta")
MODES = ("randomized", "deterministic-lambda0", "iid")


def _check_lam(lam: float) -> None:
    if not 0.0 < lam < 1.0:
        raise DomainError(f"need 0 < lambda < 1, got {lam}")


def ceil_budget(x: float) -> int:
    """Ceiling that ignores floating noise, so that 0.99 * 0.1 * 1000 maps to 99."""
    return math.ceil(x - 1e-9 * max(1.0, abs(x)))


def linear_budget(s: float, n: int, lam: float) -> int:
    """l = ceil(nu s n)."""
    return ceil_budget((1.0 - lam) * s * n)


def coeff_C(lam: float, s: float, delta: float) -> float:
    """Coefficient of 1/sqrt(n) in the linear-regime expansion."""
    _check_lam(lam)
    if not 0.0 <= s < 1.0 or not 0.0 < delta < 1.0:
        raise DomainError(f"need 0 <= s < 1 and 0 < delta < 1, got s={s}, delta={delta}")
    nu = 1.0 - lam
    q = std_normal_quantile(delta)
    return math.sqrt(s) * (1.0 - s) * (
        math.sqrt(nu / lam) * psi_times_quantile(delta) - q * math.sqrt(lam / nu) / (1.0 - s)
    )


def coeff_C_min(s: float, delta: float) -> float:
    """min over lambda of coeff_C; -inf when delta > 1/2."""
    if not 0.0 <= s < 1.0 or not 0.0 < delta < 1.0:
        raise DomainError(f"need 0 <= s < 1 and 0 < delta < 1, got s={s}, delta={delta}")
    if delta > 0.5:
        return -math.inf
    q = std_normal_quantile(delta)
    return 2.0 * math.sqrt(max(0.0, -s * (1.0 - s) * q * psi_times_quantile(delta)))


def lambda_opt_linear(s: float, delta: float) -> float:
    """The minimizer of coeff_C over lambda; 1.0 (the unattained limit) when delta >= 1/2."""
    if not 0.0 <= s < 1.0 or not 0.0 < delta < 1.0:
        raise DomainError(f"need 0 <= s < 1 and 0 < delta < 1, got s={s}, delta={delta}")
    if delta >= 0.5:
        return 1.0
    a = (1.0 - s) * psi(delta)
    return a / (a - 1.0)


def coeff_C_nonnegative_level(lam: float, s: float) -> float:
    """The delta below which coeff_C(lam, s, delta) is nonnegative."""
    _check_lam(lam)
    return psi_inverse(lam / ((1.0 - lam) * (1.0 - s)))


def rate_limit_E(lam: float, s: float, r: float) -> float:
    """Limit of the confidence limit in the linear regime with delta = exp(-r n)."""
    _check_lam(lam)
    if not 0.0 <= s < 1.0 or not r > 0:
        raise DomainError(f"need 0 <= s < 1 and r > 0, got s={s}, r={r}")
    nu = 1.0 - lam
    if r > rel_entropy(s * nu, nu):
        return 1.0
    if s == 0.0:
        return r / (r + lam * (-math.log(lam) - r))
    rt = r * t_div(nu * s / r, nu).value
    return min(1.0, (rt - nu * s) / (lam - nu * s + nu * rt))


def rate_inverse_E(lam: float, r: float, eps: float) -> float:
    """The s with rate_limit_E(lam, s, r) = eps."""
    _check_lam(lam)
    if not 0.0 < eps < 1.0 or not r > 0:
        raise DomainError(f"need 0 < eps < 1 and r > 0, got eps={eps}, r={r}")
    nu = 1.0 - lam
    if r > -lam * eps * math.log(lam) / (1.0 - nu * eps):
        raise DomainError("rate too large for the target: need r <= -lam eps ln(lam) / (1 - nu eps)")
    if rate_limit_E(lam, 0.0, r) >= eps:
        return 0.0
    s_max = s_div(nu, r) / nu
    return brentq(lambda s: rate_limit_E(lam, s, r) - eps, 0.0, s_max,
                  xtol=1e-15, rtol=8.9e-16, maxiter=200)


def rate_for_target(lam: float, s: float, eps: float) -> float:
    """The rate r with rate_limit_E(lam, s, r) = eps, for s < eps < 1."""
    _check_lam(lam)
    if not 0.0 <= s < eps < 1.0:
        raise DomainError(f"need 0 <= s < eps < 1, got s={s}, eps={eps}")
    nu = 1.0 - lam
    r_max = rel_entropy(s * nu, nu)
    return brentq(lambda r: rate_limit_E(lam, s, r) - eps, r_max * 1e-12, r_max,
                  xtol=1e-15, rtol=8.9e-16, maxiter=200)


def coeff_G(l: int, delta: float, lam: float) -> float:
    """Limit of n times the confidence limit when the budget l is fixed."""
    _check_lam(lam)
    if not 0.0 < delta < 1.0 or l < 0:
        raise DomainError(f"need 0 < delta < 1 and l >= 0, got delta={delta}, l={l}")
    ci = z_star(l, delta, lam)
    zu, zl = ci.z_star_upper, ci.z_star_lower
    b_lo = tail(zl, l, lam)
    b_up = tail(zu, l, lam)
    b_lo1 = tail(zl - 1, l, lam) if zl >= 1 else 1.0
    num = (b_lo - delta) * zu * b_lo + (delta - b_up) * zl * b_lo1
    return num / (delta * delta_zl(zl, l, lam))


@dataclass(frozen=True)
class RegimeSpec:
    """Asymptotic regime: linear (l = ceil(nu s n)) or constant (l = ceil(nu k0)).

    ``delta`` is used by the fixed-level kinds and ``r`` (delta = exp(-r n)) by
    the exponential kinds.
    """

    kind: str
    s: float = 0.0
    k0: int = 0
    r: float | None = None
    delta: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DomainError(f"unknown regime kind {self.kind!r}")
        if not 0.0 <= self.s < 1.0:
            raise DomainError(f"need 0 <= s < 1, got {self.s}")
        if self.k0 < 0:
            raise DomainError(f"need k0 >= 0, got {self.k0}")
        if self.kind.endswith("exponential-delta"):
            if self.r is None or not self.r > 0:
                raise DomainError("exponential regimes need a rate r > 0")
        elif self.delta is None or not 0.0 < self.delta < 1.0:
            raise DomainError("fixed-level regimes need 0 < delta < 1")


@dataclass(frozen=True)
class Expansion:
    """``leading + coefficient * n**(-order)``; order 0 marks a pure limit."""

    leading: float
    coefficient: float
    order: float

    def __call__(self, n: float) -> float:
        if self.order == 0:
            return self.leading
        return self.leading + self.coefficient * n ** (-self.order)


def ucl_asymptotic(spec: RegimeSpec, lam: float, mode: str, n: int | None = None) -> Expansion:
    """Expansion of the confidence limit in the regime ``spec``.

    ``n`` is only used by the deterministic linear case, whose first-order term
    contains the rounding residual ceil(s n) - s n (taken as 0 when ``n`` is None).
    """
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    if mode == "randomized":
        _check_lam(lam)
    kind, s, k0 = spec.kind, spec.s, spec.k0

    if kind == "linear-fixed-delta":
        delta = spec.delta
        if mode == "randomized":
            return Expansion(s, coeff_C(lam, s, delta), 0.5)
        if mode == "iid":
            return Expansion(s, -std_normal_quantile(delta) * math.sqrt(s * (1 - s)), 0.5)
        if s > delta:
            return Expansion(1.0, 0.0, 0)
        ups = 0.0 if n is None else ceil_budget(s * n) - s * n
        first = (1 - s + s * s - delta) / (delta * (1 - s)) + ups / delta
        return Expansion(s / delta, first, 1.0)

    if kind == "linear-exponential-delta":
        if mode == "randomized":
            return Expansion(rate_limit_E(lam, s, spec.r), 0.0, 0)
        if mode == "iid":
            return Expansion(eps_div(s, spec.r), 0.0, 0)
        return Expansion(1.0, 0.0, 0)

    if kind == "constant-fixed-delta":
        delta = spec.delta
        if mode == "randomized":
            return Expansion(0.0, coeff_G(ceil_budget((1 - lam) * k0), delta, lam), 1.0)
        if mode == "iid":
            return Expansion(0.0, t_pois(k0, delta).value, 1.0)
        return Expansion(0.0, (k0 + 1 - delta) / delta, 1.0)

    r = spec.r
    if mode == "randomized":
        top = -math.log(lam)
        return Expansion(1.0 if r >= top else r / (r + lam * (top - r)), 0.0, 0)
    if mode == "iid":
        return Expansion(-math.expm1(-r), 0.0, 0)
    return Expansion(1.0, 0.0, 0)
