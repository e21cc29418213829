"""Plot-ready datasets for the confidence-limit and detection curves."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .asymptotics import (
    ceil_budget,
    coeff_C,
    coeff_C_min,
    coeff_G,
    lambda_opt_linear,
    linear_budget,
)
from .detection import DetectionSetting, detect_prob, optimal_lambda_detection
from .errors import DomainError
from .exact import TestDesign, ucl_exact, ucl_iid_exact
from .special import std_normal_cdf, std_normal_quantile, t_pois

FIGURES = ("const-ucl", "linear-ucl", "opt-lambda", "detect-prob")


@dataclass(frozen=True)
class Dataset:
    columns: list[str]
    rows: list[list[float | None]]


def fmt(x: float | None) -> str:
    """12 significant digits; empty for missing values."""
    if x is None:
        return ""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.12g}"


def _label(x: float) -> str:
    return f"{x:g}"


def const_ucl(k0: int = 100, delta: float = 0.1, lambdas: tuple[float, ...] = (0.0, 0.01, 0.5, 0.95),
              n_max: int = 4000, step: int = 50) -> Dataset:
    """Exact limits and 1/n asymptotes with the budget fixed at ceil(nu k0)."""
    cols = ["n"]
    for lam in lambdas:
        cols += [f"exact_lam_{_label(lam)}", f"asym_lam_{_label(lam)}"]
    cols += ["exact_iid", "asym_iid"]
    g = {lam: coeff_G(ceil_budget((1 - lam) * k0), delta, lam) for lam in lambdas if lam > 0}
    tp = t_pois(k0, delta).value
    rows = []
    for n in range(step, n_max + 1, step):
        row: list[float | None] = [float(n)]
        for lam in lambdas:
            l = ceil_budget((1 - lam) * k0)
            exact = ucl_exact(TestDesign(n, l, delta, lam)).epsilon_bar if n >= l + 1 else None
            asym = (k0 + 1 - delta) / (delta * n) if lam == 0 else g[lam] / n
            row += [exact, asym]
        row += [ucl_iid_exact(k0, n, delta).epsilon_bar if n > k0 else None, tp / n]
        rows.append(row)
    return Dataset(cols, rows)


def linear_ucl(s: float = 0.1, delta: float = 0.1, lambdas: tuple[float, ...] = (0.01, 0.05),
               n_max: int = 4000, step: int = 50) -> Dataset:
    """Exact limits and 1/sqrt(n) asymptotes with the budget ceil(nu s n)."""
    lam_opt = lambda_opt_linear(s, delta)
    cols = ["n"]
    for lam in lambdas:
        cols += [f"exact_lam_{_label(lam)}", f"asym_lam_{_label(lam)}"]
    cols += ["exact_lam_opt", "asym_min", "exact_iid", "asym_iid", "exact_lam_0", "asym_lam_0"]
    coeffs = {lam: coeff_C(lam, s, delta) for lam in lambdas}
    c_min = coeff_C_min(s, delta)
    c_iid = -std_normal_quantile(delta) * math.sqrt(s * (1 - s))

    def exact(lam: float, n: int) -> float | None:
        l = linear_budget(s, n, lam)
        return ucl_exact(TestDesign(n, l, delta, lam)).epsilon_bar if n >= l + 1 else None

    rows = []
    for n in range(0, n_max + 1, step):
        row: list[float | None] = [float(n)]
        if n == 0:
            rows.append(row + [None] * (len(cols) - 1))
            continue
        root = math.sqrt(n)
        for lam in lambdas:
            row += [exact(lam, n), s + coeffs[lam] / root]
        row += [exact(lam_opt, n), s + c_min / root]
        k = ceil_budget(s * n)
        row += [ucl_iid_exact(k, n, delta).epsilon_bar if k < n else None, s + c_iid / root]
        row += [exact(0.0, n), _deterministic_linear(s, delta, n)]
        rows.append(row)
    return Dataset(cols, rows)


def _deterministic_linear(s: float, delta: float, n: int) -> float:
    if s > delta:
        return 1.0
    ups = ceil_budget(s * n) - s * n
    return s / delta + ((1 - s + s * s - delta) / (delta * (1 - s)) + ups / delta) / n


def _gaps(gap_max: float, gap_step: float) -> list[float]:
    count = int(round(gap_max / gap_step))
    return [i * gap_step for i in range(count + 1)]


def opt_lambda(thetas: tuple[float, ...] = (1e-4, 1e-3, 1e-2, 0.1), delta: float = 0.1,
               gap_max: float = 3.0, gap_step: float = 0.05) -> Dataset:
    """Detection-optimal lambda against the gap e - t."""
    cols = ["gap"] + [f"lam_opt_theta0_{_label(th)}" for th in thetas]
    rows = []
    for gap in _gaps(gap_max, gap_step):
        rows.append([gap] + [optimal_lambda_detection(th, gap, delta)[0] for th in thetas])
    return Dataset(cols, rows)


def detect_curve(theta0: float = 0.1, delta: float = 0.1, lambdas: tuple[float, ...] = (0.1, 0.3),
                 gap_max: float = 3.0, gap_step: float = 0.05) -> Dataset:
    """Limiting detection probabilities against the gap e - t."""
    cols = ["gap", "iid"] + [f"lam_{_label(lam)}" for lam in lambdas] + ["lam_opt"]
    rows = []
    for gap in _gaps(gap_max, gap_step):
        row: list[float | None] = [gap, detect_prob(DetectionSetting(theta0, gap, 0.0, delta), "iid")]
        for lam in lambdas:
            row.append(detect_prob(DetectionSetting(theta0, gap, 0.0, delta, lam), "randomized"))
        row.append(std_normal_cdf(optimal_lambda_detection(theta0, gap, delta)[1]))
        rows.append(row)
    return Dataset(cols, rows)


def build(figure: str, **params) -> Dataset:
    builders = {"const-ucl": const_ucl, "linear-ucl": linear_ucl,
                "opt-lambda": opt_lambda, "detect-prob": detect_curve}
    if figure not in builders:
        raise DomainError(f"unknown figure {figure!r}; choose from {FIGURES}")
    return builders[figure](**params)


def render(data: Dataset, fmt_name: str = "csv") -> str:
    if fmt_name == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(data.columns)
        for row in data.rows:
            writer.writerow([fmt(x) for x in row])
        return buf.getvalue()
    if fmt_name == "json":
        records = [{c: (None if x is None else float(fmt(x))) for c, x in zip(data.columns, row)}
                   for row in data.rows]
        return json.dumps({"columns": data.columns, "rows": records}, separators=(",", ":")) + "\n"
    raise DomainError(f"unknown format {fmt_name!r}")
