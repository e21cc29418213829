"""Self-check suites: oracle equivalence and structural invariants on small grids."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exact import (
    TestDesign,
    delta_z_schedule,
    ucl_exact,
    ucl_iid_exact,
    ucl_lambda0,
    ucl_sandwich,
)
from .binomial import binom_cdf, tail_bounds
from .oracle import ucl_oracle_lp

LAMBDAS = (0.1, 0.3, 1 / math.e, 0.7, 0.9)
DELTAS = tuple(0.01 + 0.02 * i for i in range(50))


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0

    def check(self, ok: bool) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1


def oracle_suite(max_n: int, lambdas=LAMBDAS, deltas=DELTAS, tol: float = 1e-9) -> SuiteResult:
    res = SuiteResult("oracle-equivalence")
    for lam in lambdas:
        for n in range(1, max_n + 1):
            for l in range(n):
                for d in deltas:
                    design = TestDesign(n, l, d, lam)
                    diff = ucl_exact(design).epsilon_bar - ucl_oracle_lp(design).epsilon_bar
                    res.check(abs(diff) <= tol)
    return res


def lambda0_suite(max_n: int, deltas=DELTAS, tol: float = 1e-12) -> SuiteResult:
    res = SuiteResult("closed-form-lambda0")
    for n in range(1, max_n + 1):
        for l in range(n):
            for d in deltas:
                design = TestDesign(n, l, d, 0.0)
                e = ucl_exact(design).epsilon_bar
                res.check(abs(e - ucl_lambda0(l, n, d)) <= tol
                          and abs(e - ucl_oracle_lp(design).epsilon_bar) <= tol)
    return res


def schedule_suite(max_n: int, lambdas=(0.1, 0.5, 0.9), tol: float = 1e-10) -> SuiteResult:
    res = SuiteResult("delta-schedule")
    for lam in lambdas:
        for n in range(1, max_n + 1):
            for z in range(n + 2):
                d, target = delta_z_schedule(n, lam, z)
                res.check(abs(ucl_exact(TestDesign(n, 0, d, lam)).epsilon_bar - target) <= tol)
    return res


def monotonicity_suite(max_n: int, lambdas=(0.0, 0.1, 1 / math.e, 0.5, 0.9),
                       deltas=tuple(i / 100 for i in range(1, 100)), tol: float = 1e-12) -> SuiteResult:
    """Nonincreasing in delta and n, nondecreasing in l, for both randomized and iid limits."""
    res = SuiteResult("monotonicity")
    grids = {lam: [[[ucl_exact(TestDesign(n, l, d, lam)).epsilon_bar for d in deltas]
                    for l in range(n)] for n in range(1, max_n + 1)] for lam in lambdas}
    grids["iid"] = [[[ucl_iid_exact(k, n, d).epsilon_bar for d in deltas]
                     for k in range(n)] for n in range(1, max_n + 1)]
    for grid in grids.values():
        for ni, by_l in enumerate(grid):
            for li, row in enumerate(by_l):
                for a, b in zip(row, row[1:]):
                    res.check(b <= a + tol)
                if li + 1 < len(by_l):
                    res.check(all(x <= y + tol for x, y in zip(row, by_l[li + 1])))
                if ni + 1 < len(grid):
                    res.check(all(y <= x + tol for x, y in zip(row, grid[ni + 1][li])))
    return res


def sandwich_suite(max_n: int, lambdas=LAMBDAS, deltas=DELTAS, tol: float = 1e-12) -> SuiteResult:
    res = SuiteResult("sandwich-bounds")
    for lam in lambdas:
        for n in range(1, max_n + 1):
            for l in range(n):
                for d in deltas:
                    design = TestDesign(n, l, d, lam)
                    lo, hi = ucl_sandwich(design)
                    comp = ucl_exact(design).complement
                    res.check(lo - tol <= comp <= hi + tol)
    return res


def lower_bound_suite(max_n: int, lambdas=LAMBDAS, deltas=DELTAS, tol: float = 1e-12) -> SuiteResult:
    """Strict lower bounds on the limit for delta <= 1/2 (iid, randomized, deterministic)."""
    res = SuiteResult("lower-bounds")
    for n in range(1, max_n + 1):
        for l in range(n):
            for d in deltas:
                if d > 0.5:
                    continue
                res.check(ucl_iid_exact(l, n, d).epsilon_bar > l / n)
                if l / n < d:
                    res.check(ucl_lambda0(l, n, d) > l / (n * d))
                for lam in (0.0,) + tuple(lambdas):
                    e = ucl_exact(TestDesign(n, l, d, lam)).epsilon_bar
                    nu = 1 - lam
                    res.check(e >= 1.0 - tol if l >= nu * n else e > l / (nu * n))
    return res


def tail_bound_suite(max_z: int, lambdas=LAMBDAS) -> SuiteResult:
    """Chernoff, reverse Chernoff and Berry-Esseen bounds on the binomial tail."""
    res = SuiteResult("tail-bounds")
    for lam in lambdas:
        nu = 1 - lam
        for z in range(2, max_z + 1):
            for l in range(1, z):
                if l > nu * z:
                    break
                upper, lower, normal, be = tail_bounds(z, l, lam)
                b = binom_cdf(z, l, nu)
                res.check(lower <= b * (1 + 1e-12) and b <= upper * (1 + 1e-12))
                res.check(abs(b - normal) <= be)
    return res


def ratio_bound_suite(max_z: int, lambdas=LAMBDAS, tol: float = 1e-12) -> SuiteResult:
    """Bounds on B_{z,l}/B_{z+1,l} and monotonicity of that ratio in z."""
    res = SuiteResult("ratio-bounds")
    for lam in lambdas:
        nu = 1 - lam
        for l in range(max_z + 1):
            prev = None
            for z in range(l, max_z + 1):
                ratio = binom_cdf(z, l, nu) / binom_cdf(z + 1, l, nu)
                lo = (z - l + 1) / ((z + 1) * lam)
                res.check(lo * (1 - tol) <= ratio <= (1 + tol) / lam)
                if l <= nu * z:
                    res.check(ratio <= (z - l + 1 + math.sqrt(lam * l)) / ((z + 1) * lam) * (1 + tol))
                if prev is not None:
                    res.check(ratio >= prev * (1 - tol))
                prev = ratio
    return res


SUITES = {
    "oracle": oracle_suite,
    "lambda0": lambda0_suite,
    "schedule": schedule_suite,
    "monotonicity": monotonicity_suite,
    "sandwich": sandwich_suite,
    "lower-bounds": lower_bound_suite,
    "tail-bounds": tail_bound_suite,
    "ratio-bounds": ratio_bound_suite,
}


def run_suites(max_n: int, names=tuple(SUITES)) -> list[SuiteResult]:
    return [SUITES[name](max_n) for name in names]
