"""Sample-size and failure-budget planners, exact and leading-order."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .asymptotics import (
    ceil_budget,
    coeff_C,
    coeff_C_min,
    coeff_G,
    rate_for_target,
    rate_inverse_E,
)
from .binomial import z_star
from .errors import DomainError, InfeasibleError
from .exact import TestDesign, ucl_exact, ucl_iid_exact
from .special import rel_entropy, s_div, std_normal_quantile, t_pois

SCAN_CAP = 10 ** 7
_MAX_DOUBLINGS = 60


@dataclass(frozen=True)
class PlanResult:
    """A planned sample size or failure budget.

    ``certificate`` holds the confidence limit at ``value`` and at the adjacent
    value on the infeasible side (None when that neighbour is inadmissible).
    """

    value: int | None
    method: str
    certificate: tuple[float, float | None] | None = None


def _check_eps_delta(eps: float, delta: float) -> None:
    if not 0.0 < eps < 1.0 or not 0.0 < delta < 1.0:
        raise DomainError(f"need 0 < eps < 1 and 0 < delta < 1, got eps={eps}, delta={delta}")


def _ucl(l: int, n: int, delta: float, lam: float) -> float:
    return ucl_exact(TestDesign(n, l, delta, lam)).epsilon_bar


def _ucl_iid(k: int, n: int, delta: float) -> float:
    return ucl_iid_exact(k, n, delta).epsilon_bar


def _min_n_monotone(first: int, ucl: Callable[[int], float], eps: float, hint: int) -> PlanResult:
    """Smallest n >= first with ucl(n) <= eps, for ucl nonincreasing in n."""
    if ucl(first) <= eps:
        return PlanResult(first, "exact-search", (ucl(first), None))
    lo, hi = first, max(first + 1, hint)
    for _ in range(_MAX_DOUBLINGS):
        if ucl(hi) <= eps:
            break
        lo, hi = hi, 2 * hi
    else:
        raise InfeasibleError(f"no n up to {hi} reaches eps={eps}")
    while hi - lo > 1:  # ucl(lo) > eps >= ucl(hi)
        mid = (lo + hi) // 2
        if ucl(mid) <= eps:
            hi = mid
        else:
            lo = mid
    return PlanResult(hi, "exact-search", (ucl(hi), ucl(hi - 1)))


def min_n_constant_exact(l: int, eps: float, delta: float, lam: float) -> PlanResult:
    """Minimal n with the confidence limit at fixed budget l at most eps."""
    _check_eps_delta(eps, delta)
    if l < 0 or not 0.0 <= lam < 1.0:
        raise DomainError(f"need l >= 0 and 0 <= lambda < 1, got l={l}, lambda={lam}")
    hint = l + 2
    if lam > 0 and delta <= 0.5:
        zs = z_star(l, delta, lam).z_star_upper
        hint = math.ceil((zs - l + 1 + math.sqrt(lam * l)) / (lam * eps))
    return _min_n_monotone(l + 1, lambda n: _ucl(l, n, delta, lam), eps, hint)


def min_n_iid_constant_exact(k: int, eps: float, delta: float) -> PlanResult:
    """Minimal n with the iid confidence limit at fixed count k at most eps."""
    _check_eps_delta(eps, delta)
    if k < 0:
        raise DomainError(f"need k >= 0, got {k}")
    hint = math.ceil(2 * (k + 1 - math.log(delta)) / eps)
    return _min_n_monotone(k + 1, lambda n: _ucl_iid(k, n, delta), eps, hint)


def min_n_linear_exact(s: float, eps: float, delta: float, lam: float,
                       mode: str = "randomized") -> PlanResult:
    """Minimal n with the confidence limit at budget ceil(nu s n) at most eps.

    The budget grows with n, so no monotonicity is available; every n from the
    smallest admissible one upward is checked until the first success.
    """
    _check_eps_delta(eps, delta)
    if not 0.0 <= s < 1.0:
        raise DomainError(f"need 0 <= s < 1, got {s}")
    if mode not in ("randomized", "iid"):
        raise DomainError(f"mode must be randomized or iid, got {mode!r}")
    if not 0.0 <= lam < 1.0:
        raise DomainError(f"need 0 <= lambda < 1, got {lam}")
    if delta <= 0.5 and eps <= s:
        raise InfeasibleError("the confidence limit exceeds s for every n when delta <= 1/2")
    nu = 1.0 if mode == "iid" else 1.0 - lam

    def ucl(n: int) -> float | None:
        l = ceil_budget(nu * s * n)
        if n < l + 1:
            return None
        return _ucl_iid(l, n, delta) if mode == "iid" else _ucl(l, n, delta, lam)

    prev = None
    for n in range(1, SCAN_CAP + 1):
        u = ucl(n)
        if u is not None and u <= eps:
            return PlanResult(n, "exact-search", (u, prev))
        prev = u
    raise InfeasibleError(f"no n up to {SCAN_CAP} reaches eps={eps}")


def max_failures_exact(n: int, eps: float, delta: float, lam: float,
                       mode: str = "randomized") -> PlanResult:
    """Largest budget l with confidence limit at most eps; value None if none exists."""
    _check_eps_delta(eps, delta)
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if mode not in ("randomized", "iid"):
        raise DomainError(f"mode must be randomized or iid, got {mode!r}")
    if mode == "iid":
        ucl = lambda l: _ucl_iid(l, n, delta)
    else:
        ucl = lambda l: _ucl(l, n, delta, lam)
    if ucl(0) > eps:
        return PlanResult(None, "exact-search", (ucl(0), None))
    lo, hi = 0, n  # ucl(lo) <= eps; hi is the first index known to fail (or n)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ucl(mid) <= eps:
            lo = mid
        else:
            hi = mid
    nxt = ucl(lo + 1) if lo + 1 <= n - 1 else None
    return PlanResult(lo, "exact-search", (ucl(lo), nxt))


# -- leading-order formulas ----------------------------------------------------

def _ln_inv(delta: float) -> float:
    return -math.log(delta)


def n_linear(lam: float, s: float, eps: float, delta: float) -> float:
    return (coeff_C(lam, s, delta) / (eps - s)) ** 2


def n_linear_optimal(s: float, eps: float, delta: float) -> float:
    return (coeff_C_min(s, delta) / (eps - s)) ** 2


def n_linear_iid(s: float, eps: float, delta: float) -> float:
    return std_normal_quantile(delta) ** 2 * s * (1 - s) / (eps - s) ** 2


def n_linear_small_delta(lam: float, s: float, eps: float, delta: float) -> float:
    return _ln_inv(delta) / rate_for_target(lam, s, eps)


def n_linear_iid_small_delta(s: float, eps: float, delta: float) -> float:
    return _ln_inv(delta) / rel_entropy(s, eps)


def n_constant_deterministic(k0: int, eps: float, delta: float) -> float:
    return (k0 + 1 - delta) / (delta * eps)


def n_constant(lam: float, k0: int, eps: float, delta: float) -> float:
    return coeff_G(ceil_budget((1 - lam) * k0), delta, lam) / eps


def n_constant_iid(k0: int, eps: float, delta: float) -> float:
    return t_pois(k0, delta).value / eps


def n_constant_deterministic_small_delta(k0: int, eps: float, delta: float) -> float:
    return (k0 + 1) / (delta * eps)


def n_constant_small_delta(lam: float, eps: float, delta: float) -> float:
    nu = 1 - lam
    return (1 - nu * eps) * _ln_inv(delta) / (lam * eps * -math.log(lam))


def n_constant_iid_small_delta(eps: float, delta: float) -> float:
    return _ln_inv(delta) / -math.log1p(-eps)


def l_deterministic(n: int, eps: float, delta: float) -> int:
    de = delta * eps
    return math.floor(de * n - (1 - delta - de + de * de) / (1 - de))


def l_randomized(lam: float, n: int, eps: float, delta: float) -> float:
    nu = 1 - lam
    return eps * nu * n - coeff_C(lam, eps, delta) * nu * math.sqrt(n)


def l_iid(n: int, eps: float, delta: float) -> float:
    return eps * n + std_normal_quantile(delta) * math.sqrt(eps * (1 - eps) * n)


def l_randomized_rate(lam: float, n: int, eps: float, r: float) -> float:
    return (1 - lam) * rate_inverse_E(lam, r, eps) * n


def l_iid_rate(n: int, eps: float, r: float) -> float:
    if r > -math.log1p(-eps):
        raise DomainError("need r <= -ln(1 - eps)")
    return s_div(eps, r) * n


def small_delta_constant_factor(lam: float) -> float:
    """Limit of eps N / ln(1/delta) in the constant regime; minimized at lam = 1/e."""
    if not 0.0 < lam < 1.0:
        raise DomainError(f"need 0 < lambda < 1, got {lam}")
    return 1.0 / (lam * -math.log(lam))


FORMULAS: dict[str, Callable[..., float]] = {
    "n-linear": n_linear,
    "n-linear-optimal": n_linear_optimal,
    "n-linear-iid": n_linear_iid,
    "n-linear-small-delta": n_linear_small_delta,
    "n-linear-iid-small-delta": n_linear_iid_small_delta,
    "n-constant-deterministic": n_constant_deterministic,
    "n-constant": n_constant,
    "n-constant-iid": n_constant_iid,
    "n-constant-deterministic-small-delta": n_constant_deterministic_small_delta,
    "n-constant-small-delta": n_constant_small_delta,
    "n-constant-iid-small-delta": n_constant_iid_small_delta,
    "l-deterministic": l_deterministic,
    "l-randomized": l_randomized,
    "l-iid": l_iid,
    "l-randomized-rate": l_randomized_rate,
    "l-iid-rate": l_iid_rate,
    "small-delta-constant-factor": small_delta_constant_factor,
}


def plan_asymptotics(formula: str, **params: float) -> float:
    """Evaluate the named leading-order planning formula (see ``FORMULAS``)."""
    try:
        fn = FORMULAS[formula]
    except KeyError:
        raise DomainError(f"unknown formula {formula!r}; choose from {sorted(FORMULAS)}") from None
    return float(fn(**params))


def deterministic_linear_excess(s: float, eps: float, delta: float) -> float:
    """|(eps - s/delta) N - a - 1/(2 delta)| for the deterministic test, where
    N is the exact minimal sample size with budget ceil(s n) and
    a = (1 - s + s^2 - delta) / (delta (1 - s)). Near eps = s/delta this stays
    below 1/(2 delta)."""
    if not s < delta <= 0.5:
        raise DomainError("need s < delta <= 1/2")
    n = min_n_linear_exact(s, eps, delta, 0.0).value
    a = (1 - s + s * s - delta) / (delta * (1 - s))
    return abs((eps - s / delta) * n - a - 1 / (2 * delta))
