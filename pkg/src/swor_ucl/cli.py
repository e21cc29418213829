"""Command-line interface.

Every command prints one JSON object on a single line, except ``curve`` which
writes a CSV or JSON dataset. Exit codes: 0 success, 1 failed verification,
2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .asymptotics import ceil_budget
from .curves import FIGURES, build, fmt, render
from .detection import (
    DetectionSetting,
    detect_prob,
    detect_threshold,
    optimal_lambda_detection,
    required_gap,
)
from .errors import DomainError, InfeasibleError, ScaleError
from .exact import TestDesign, ucl_exact, ucl_iid_exact, ucl_sandwich
from .oracle import simulate_protocol, ucl_oracle_lp
from .planners import (
    max_failures_exact,
    min_n_constant_exact,
    min_n_iid_constant_exact,
    min_n_linear_exact,
    plan_asymptotics,
)
from .verify import SUITES, run_suites

OUTPUT_DIR_ENV = "SWOR_UCL_OUTPUT_DIR"


class UsageError(Exception):
    pass


def _num(x):
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, float):
        if math.isfinite(x):
            return float(fmt(x))
        return fmt(x)
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _emit(command: str, params: dict, result: dict, method: str) -> None:
    record = {"command": command, "params": _num(params), "result": _num(result),
              "method": method, "version": __version__}
    print(json.dumps(record, separators=(",", ":")))


def _params(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("command", "func") and v is not None}


def cmd_ucl(args: argparse.Namespace) -> int:
    if args.iid is not None:
        bound = ucl_iid_exact(args.iid, args.n, args.delta)
        _emit("ucl", _params(args), {"epsilon_bar": bound.epsilon_bar,
                                     "complement": bound.complement}, bound.method)
        return 0
    if args.l is None or args.lam is None:
        raise UsageError("ucl needs --l and --lambda (or --iid K)")
    design = TestDesign(args.n, args.l, args.delta, args.lam)
    bound = ucl_exact(design)
    result = {"epsilon_bar": bound.epsilon_bar, "complement": bound.complement,
              "z_hat": bound.z_hat}
    if args.bounds:
        lo, hi = ucl_sandwich(design)
        result["complement_lower"] = lo
        result["complement_upper"] = hi
    if args.oracle:
        result["epsilon_bar_oracle"] = ucl_oracle_lp(design).epsilon_bar
    _emit("ucl", _params(args), result, bound.method)
    return 0


def _plan_record(plan) -> dict:
    cert = plan.certificate
    return {"value": plan.value,
            "ucl_at_value": cert[0] if cert else None,
            "ucl_at_neighbour": cert[1] if cert else None}


def cmd_plan(args: argparse.Namespace) -> int:
    eps, delta, lam = args.eps, args.delta, args.lam
    if args.regime == "constant":
        if args.k0 is None:
            raise UsageError("constant regime needs --k0")
        if args.asymptotic:
            if args.iid:
                value = plan_asymptotics("n-constant-iid", k0=args.k0, eps=eps, delta=delta)
            elif lam == 0:
                value = plan_asymptotics("n-constant-deterministic", k0=args.k0, eps=eps, delta=delta)
            else:
                value = plan_asymptotics("n-constant", lam=lam, k0=args.k0, eps=eps, delta=delta)
            _emit("plan", _params(args), {"value": value}, "asymptotic")
            return 0
        if args.iid:
            plan = min_n_iid_constant_exact(args.k0, eps, delta)
        else:
            plan = min_n_constant_exact(ceil_budget((1 - lam) * args.k0), eps, delta, lam)
    else:
        if args.s is None:
            raise UsageError("linear regime needs --s")
        if args.asymptotic:
            if args.iid:
                value = plan_asymptotics("n-linear-iid", s=args.s, eps=eps, delta=delta)
            else:
                value = plan_asymptotics("n-linear", lam=lam, s=args.s, eps=eps, delta=delta)
            _emit("plan", _params(args), {"value": value}, "asymptotic")
            return 0
        plan = min_n_linear_exact(args.s, eps, delta, lam, "iid" if args.iid else "randomized")
    _emit("plan", _params(args), _plan_record(plan), plan.method)
    return 0


def cmd_max_failures(args: argparse.Namespace) -> int:
    if args.asymptotic:
        if args.iid:
            value = plan_asymptotics("l-iid", n=args.n, eps=args.eps, delta=args.delta)
        elif args.lam == 0:
            value = plan_asymptotics("l-deterministic", n=args.n, eps=args.eps, delta=args.delta)
        else:
            value = plan_asymptotics("l-randomized", lam=args.lam, n=args.n, eps=args.eps,
                                     delta=args.delta)
        _emit("max-failures", _params(args), {"value": value}, "asymptotic")
        return 0
    plan = max_failures_exact(args.n, args.eps, args.delta, args.lam,
                              "iid" if args.iid else "randomized")
    _emit("max-failures", _params(args), _plan_record(plan), plan.method)
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    if args.optimal:
        lam, kap = optimal_lambda_detection(args.theta0, args.gap, args.delta)
    elif args.lam is not None:
        lam = args.lam
    else:
        raise UsageError("detect needs --lambda or --optimal")
    iid = DetectionSetting(args.theta0, args.gap, 0.0, args.delta)
    result = {"lambda": lam,
              "detect_prob_iid": detect_prob(iid, "iid"),
              "threshold_iid": detect_threshold(iid, "iid")}
    if lam == 0:
        result["detect_prob"] = 0.0
        result["threshold"] = -math.inf
    elif lam == 1.0:  # limit of the optimum at zero gap
        result["threshold"] = kap
        result["detect_prob"] = detect_prob(iid, "iid") if args.gap == 0 else None
    else:
        setting = DetectionSetting(args.theta0, args.gap, 0.0, args.delta, lam)
        result["threshold"] = detect_threshold(setting, "randomized")
        result["detect_prob"] = detect_prob(setting, "randomized")
    if args.p0 is not None:
        if not 0 < lam < 1:
            raise UsageError("--p0 needs 0 < lambda < 1")
        result["required_gap"] = required_gap(args.theta0, args.delta, lam, args.p0)
    _emit("detect", _params(args), result, "limit")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    design = TestDesign(args.n, args.l, args.delta, args.lam)
    out = simulate_protocol(args.truth, design, args.trials, args.seed,
                            method=args.method, workers=args.workers)
    _emit("simulate", _params(args), dict(vars(out)), "monte-carlo")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    names = args.suites or list(SUITES)
    results = run_suites(args.max_n, names)
    summary = {r.name: {"passed": r.passed, "failed": r.failed} for r in results}
    ok = all(r.failed == 0 for r in results)
    _emit("verify", _params(args), {"ok": ok, "suites": summary}, "suites")
    return 0 if ok else 1


def _split_floats(text: str | None) -> tuple[float, ...] | None:
    if text is None:
        return None
    return tuple(float(x) for x in text.split(","))


def cmd_curve(args: argparse.Namespace) -> int:
    params: dict = {}
    fig = args.figure
    if args.delta is not None:
        params["delta"] = args.delta
    if fig in ("const-ucl", "linear-ucl"):
        if args.lambdas:
            params["lambdas"] = _split_floats(args.lambdas)
        if args.n_max is not None:
            params["n_max"] = args.n_max
        if args.step is not None:
            params["step"] = args.step
        if fig == "const-ucl" and args.k0 is not None:
            params["k0"] = args.k0
        if fig == "linear-ucl" and args.s is not None:
            params["s"] = args.s
    else:
        if args.gap_max is not None:
            params["gap_max"] = args.gap_max
        if args.gap_step is not None:
            params["gap_step"] = args.gap_step
        if fig == "opt-lambda" and args.thetas:
            params["thetas"] = _split_floats(args.thetas)
        if fig == "detect-prob":
            if args.theta0 is not None:
                params["theta0"] = args.theta0
            if args.lambdas:
                params["lambdas"] = _split_floats(args.lambdas)
    data = build(fig, **params)
    text = render(data, args.format)

    out = args.out
    if out is None and os.environ.get(OUTPUT_DIR_ENV):
        out = str(Path(os.environ[OUTPUT_DIR_ENV]) / f"{fig}.{args.format}")
    if out is None:
        sys.stdout.write(text)
        return 0
    path = Path(out)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    _emit("curve", {"figure": fig, "format": args.format, "out": str(path)},
          {"rows": len(data.rows)}, "dataset")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swor-ucl", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ucl", help="exact upper confidence limit")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--l", type=int)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--iid", type=int, metavar="K", help="iid limit with K observed failures")
    s.add_argument("--bounds", action="store_true", help="also report the analytic bracket")
    s.add_argument("--oracle", action="store_true", help="also report the brute-force value")
    s.set_defaults(func=cmd_ucl)

    s = sub.add_parser("plan", help="minimum sample size")
    s.add_argument("--regime", choices=("constant", "linear"), required=True)
    s.add_argument("--k0", type=int)
    s.add_argument("--s", type=float)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--lambda", dest="lam", type=float, default=0.0)
    s.add_argument("--iid", action="store_true")
    s.add_argument("--asymptotic", action="store_true")
    s.set_defaults(func=cmd_plan)

    s = sub.add_parser("max-failures", help="largest failure budget")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--lambda", dest="lam", type=float, default=0.0)
    s.add_argument("--iid", action="store_true")
    s.add_argument("--asymptotic", action="store_true")
    s.set_defaults(func=cmd_max_failures)

    s = sub.add_parser("detect", help="limiting detection probability")
    s.add_argument("--theta0", type=float, required=True)
    s.add_argument("--gap", type=float, required=True, help="e - t")
    s.add_argument("--delta", type=float, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--optimal", action="store_true")
    s.add_argument("--p0", type=float)
    s.set_defaults(func=cmd_detect)

    s = sub.add_parser("simulate", help="Monte-Carlo run of the protocol")
    s.add_argument("--truth", required=True, help="vertex:<z> or iid:<theta>")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--delta", type=float, default=0.5, help="recorded only")
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--method", choices=("auto", "per-unit", "counts"), default="auto")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("verify", help="run the self-check suites")
    s.add_argument("--max-n", type=int, default=12)
    s.add_argument("--suites", nargs="+", choices=tuple(SUITES))
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("curve", help="write a plot-ready dataset")
    s.add_argument("figure", choices=FIGURES)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out")
    s.add_argument("--delta", type=float)
    s.add_argument("--k0", type=int)
    s.add_argument("--s", type=float)
    s.add_argument("--lambdas", help="comma-separated")
    s.add_argument("--thetas", help="comma-separated")
    s.add_argument("--theta0", type=float)
    s.add_argument("--n-max", type=int)
    s.add_argument("--step", type=int)
    s.add_argument("--gap-max", type=float)
    s.add_argument("--gap-step", type=float)
    s.set_defaults(func=cmd_curve)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError, ScaleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
