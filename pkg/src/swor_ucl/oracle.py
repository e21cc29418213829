"""Independent ground truth: a brute-force linear-fractional oracle and a protocol simulator.

The oracle rebuilds every vertex of the achievable region by enumerating the
channel outcomes directly (repeated convolution of the single-unit channel law)
and then minimizes the conditional success ratio over all vertex pairs. It does
not call into the binomial routines used by the exact computation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exact import ConfidenceBound, RegionPoint, TestDesign
from .errors import DomainError, ScaleError

ORACLE_MAX_N = 2000


@dataclass(frozen=True)
class AdversaryMixture:
    """Probabilities Q(Z = z) for z = 0..n+1."""

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < -1e-15) or abs(w.sum() - 1.0) > 1e-9:
            raise DomainError("mixture weights must lie on the simplex")

    @property
    def support(self) -> list[int]:
        return [z for z, w in enumerate(self.weights) if w > 0]


@dataclass(frozen=True)
class SimOutcome:
    trials: int
    seed: int
    accept_count: int
    joint_fail_count: int
    p_accept: float
    p_fail_given_accept: float
    std_err_accept: float
    std_err_cond: float


@lru_cache(maxsize=4096)
def _channel_laws(kmax: int, lam: float) -> np.ndarray:
    """Row k holds the law of the reported failure count given k true failures."""
    laws = np.zeros((kmax + 1, kmax + 1))
    laws[0, 0] = 1.0
    unit = np.array([lam, 1.0 - lam])  # reported 0 with prob lam, 1 otherwise
    for k in range(1, kmax + 1):
        laws[k, : k + 1] = np.convolve(laws[k - 1, :k], unit)
    return laws


@lru_cache(maxsize=4096)
def _oracle_vertices(n: int, l: int, lam: float) -> tuple[np.ndarray, np.ndarray]:
    laws = _channel_laws(n, lam)
    accept = laws[:, : l + 1].sum(axis=1)  # P(L <= l | K = k)
    h = np.empty(n + 2)
    g = np.empty(n + 2)
    for z in range(n + 2):
        p_last_fail = z / (n + 1)
        acc_if_last_ok = accept[z] if z <= n else 0.0
        acc_if_last_fail = accept[z - 1] if z >= 1 else 0.0
        h[z] = (1 - p_last_fail) * acc_if_last_ok + p_last_fail * acc_if_last_fail
        g[z] = (1 - p_last_fail) * acc_if_last_ok
    return h, g


def oracle_region_points(design: TestDesign) -> list[RegionPoint]:
    if design.n > ORACLE_MAX_N:
        raise ScaleError(f"oracle limited to n <= {ORACLE_MAX_N}, got {design.n}")
    h, g = _oracle_vertices(design.n, design.l, design.lam)
    return [RegionPoint(z, float(h[z]), float(g[z])) for z in range(design.n + 2)]


def ucl_oracle_lp(design: TestDesign) -> ConfidenceBound:
    """Minimize g.w / h.w subject to h.w >= delta over the simplex by vertex enumeration.

    The feasible set is the simplex cut by one half-space; its vertices are the
    unit vectors with h_z >= delta and the points on edges (z1, z2) where
    h.w = delta. A linear-fractional objective attains its minimum at one of them.
    """
    if design.n > ORACLE_MAX_N:
        raise ScaleError(f"oracle limited to n <= {ORACLE_MAX_N}, got {design.n}")
    delta = design.delta if design.log_delta is None else math.exp(design.log_delta)
    if delta == 0.0:
        raise ScaleError(f"oracle needs a representable delta, got log_delta={design.ln_delta}")
    h, g = _oracle_vertices(design.n, design.l, design.lam)
    size = len(h)
    best, arg = math.inf, None

    single = np.flatnonzero(h >= delta)
    if single.size:
        ratios = g[single] / h[single]
        i = int(np.argmin(ratios))
        best, arg = float(ratios[i]), (int(single[i]),)

    above = np.flatnonzero(h > delta)
    below = np.flatnonzero(h < delta)
    if above.size and below.size:
        ha, hb = h[above][:, None], h[below][None, :]
        w = (delta - hb) / (ha - hb)  # weight on the vertex above delta
        vals = (w * g[above][:, None] + (1 - w) * g[below][None, :]) / delta
        idx = np.unravel_index(int(np.argmin(vals)), vals.shape)
        if vals[idx] < best:
            best = float(vals[idx])
            arg = (int(above[idx[0]]), int(below[idx[1]]), float(w[idx]))

    if arg is None:
        return ConfidenceBound(1.0, 0.0, "oracle-lp")
    weights = [0.0] * size
    if len(arg) == 1:
        weights[arg[0]] = 1.0
    else:
        weights[arg[0]] = arg[2]
        weights[arg[1]] = 1.0 - arg[2]
    comp = min(1.0, max(0.0, best))
    return ConfidenceBound(1.0 - comp, comp, "oracle-lp", arg[0],
                           AdversaryMixture(tuple(weights)))


def _lower_hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    lowest: dict[float, float] = {}
    for x, y in points:
        lowest[x] = min(y, lowest.get(x, math.inf))
    pts = sorted(lowest.items())
    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def lower_envelope_eval(design: TestDesign, x: float) -> float:
    """The lower boundary of the achievable region at abscissa ``x``."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"need 0 <= x <= 1, got {x}")
    hull = _lower_hull([(p.h, p.g) for p in oracle_region_points(design)])
    xs = [p[0] for p in hull]
    if x <= xs[0]:
        return 0.0
    return float(np.interp(x, xs, [p[1] for p in hull]))


# -- simulator ---------------------------------------------------------------

def _parse_truth(truth: str | tuple) -> tuple[str, float]:
    if isinstance(truth, tuple):
        kind, val = truth
    else:
        kind, _, val = truth.partition(":")
    kind = kind.strip().lower()
    if kind not in ("vertex", "iid"):
        raise DomainError(f"truth must be vertex:<z> or iid:<theta>, got {truth!r}")
    return kind, float(val)


def _simulate_chunk(kind: str, value: float, design: TestDesign, trials: int,
                    rng: np.random.Generator, per_unit: bool) -> tuple[int, int]:
    n, l, lam = design.n, design.l, design.lam
    if per_unit:
        if kind == "vertex":
            z = int(value)
            keys = rng.random((trials, n + 1))
            ranks = keys.argsort(axis=1).argsort(axis=1)
            y = ranks < z  # z ones at uniformly random positions
        else:
            y = rng.random((trials, n + 1)) < value
        kept = rng.random((trials, n)) >= lam
        failures = np.count_nonzero(y[:, :n] & kept, axis=1)
        last = y[:, n]
    else:
        if kind == "vertex":
            z = int(value)
            last = rng.random(trials) < z / (n + 1)
            k = z - last.astype(np.int64)
        else:
            k = rng.binomial(n, value, size=trials)
            last = rng.random(trials) < value
        failures = rng.binomial(k, 1.0 - lam)
    accepted = failures <= l
    return int(accepted.sum()), int((accepted & last).sum())


def simulate_protocol(truth: str | tuple, design: TestDesign, trials: int, seed: int,
                      *, method: str = "auto", workers: int = 1) -> SimOutcome:
    """Monte-Carlo run of the sampling, channel and acceptance protocol.

    ``truth`` is ``"vertex:<z>"`` (z failures placed uniformly among n + 1 slots)
    or ``"iid:<theta>"``. ``method="per-unit"`` draws every variable explicitly;
    ``"counts"`` draws the equivalent sufficient statistics. ``"auto"`` uses the
    per-unit draw when ``n * trials`` is at most 2e7.
    With ``workers > 1`` the trials are split over sub-seeds ``(seed, worker)``.
    """
    if trials < 1:
        raise DomainError(f"need trials >= 1, got {trials}")
    kind, value = _parse_truth(truth)
    if kind == "vertex" and not (value == int(value) and 0 <= value <= design.n + 1):
        raise DomainError(f"vertex index must be an integer in [0, n+1], got {value}")
    if kind == "iid" and not 0.0 <= value <= 1.0:
        raise DomainError(f"iid theta must lie in [0, 1], got {value}")
    if method not in ("auto", "per-unit", "counts"):
        raise DomainError(f"unknown method {method!r}")
    per_unit = method == "per-unit" or (method == "auto" and design.n * trials <= 2e7)

    def run(rng: np.random.Generator, count: int) -> tuple[int, int]:
        acc = fail = 0
        chunk = max(1, int(2e6 // (design.n + 1))) if per_unit else count
        done = 0
        while done < count:
            m = min(chunk, count - done)
            a, f = _simulate_chunk(kind, value, design, m, rng, per_unit)
            acc, fail, done = acc + a, fail + f, done + m
        return acc, fail

    if workers <= 1:
        acc, fail = run(np.random.default_rng(seed), trials)
    else:
        shares = [trials // workers + (i < trials % workers) for i in range(workers)]
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda i: run(np.random.default_rng([seed, i]), shares[i]),
                                  range(workers)))
        acc = sum(p[0] for p in parts)
        fail = sum(p[1] for p in parts)

    p_acc = acc / trials
    p_cond = fail / acc if acc else math.nan
    se_cond = math.sqrt(p_cond * (1 - p_cond) / acc) if acc else math.nan
    return SimOutcome(trials, seed, acc, fail, p_acc, p_cond,
                      math.sqrt(p_acc * (1 - p_acc) / trials), se_cond)
