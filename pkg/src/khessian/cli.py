"""Command-line interface.

Subcommands
-----------
verify      run every formula/invariant suite; exit 0 iff all pass
constants   print the derived constants (alpha, M, lambda*, eps0, c*, r0, r)
solve       one regularized Dirichlet solve; writes solution CSV + report JSON
continue    eps-continuation along a schedule
sandwich    compare a stored solution against the barrier envelopes
holder      growth-exponent fit of an axis profile of a stored solution
kink        one-sided slopes / kink gap of an axis profile

Exit codes: 0 success, 1 check failure, 2 usage error, 3 numerical failure.
Output is free of timestamps, so identical invocations produce identical bytes
(pass --timings to verify to include wall-clock times).
"""

import argparse
import importlib
import json
import sys

import numpy as np

from . import verification
from .analysis import axis_profile, holder_fit, kink_detector
from .barriers import PogorelovLower, PogorelovParams, PogorelovUpper, choose_eps0, choose_lambda_star, choose_M, choose_r
from .errors import ConvergenceError, DomainError, KHessianError
from .grids import build_grid
from .operators import RhsSpec
from .serialize import (grid_from_report, load_report_json, read_solution_csv,
                        write_report_json, write_solution_csv)
from .solver import SolverConfig, compare, continuation_in_eps, solve_regularized

_ZERO = "zero"
_PHI_EPS = "phi_eps"


def _parse_rhs(spec):
    """constant:C | bounded_monotone:A,B | affine:A,B[,LO,HI]"""
    try:
        kind, _, rest = spec.partition(":")
        args = [float(x) for x in rest.split(",")] if rest else []
        if kind == "constant":
            return RhsSpec.constant(*args)
        if kind == "bounded_monotone":
            return RhsSpec.bounded_monotone(*args)
        if kind == "affine":
            if len(args) == 4:
                return RhsSpec.affine(args[0], args[1], (args[2], args[3]))
            return RhsSpec.affine(*args)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"bad rhs spec {spec!r}: {exc}") from exc
    raise DomainError(f"unknown rhs kind in {spec!r} (use constant/bounded_monotone/affine)")


def _boundary_callable(name, params):
    if name == _ZERO:
        return lambda z: np.zeros(z.shape[0]) if z.ndim == 2 else 0.0
    if name == _PHI_EPS:
        upper = PogorelovUpper(params)
        return upper.value
    if name.startswith("import:"):
        try:
            _, module, attr = name.split(":", 2)
        except ValueError as exc:
            raise DomainError(f"custom boundary must be import:module:attr, got {name!r}") from exc
        return getattr(importlib.import_module(module), attr)
    raise DomainError(f"unknown boundary {name!r} (use zero, phi_eps or import:module:attr)")


def _emit(args, payload):
    print(json.dumps(payload, indent=2, sort_keys=True))


def _error_payload(exc):
    return {"error": {"kind": type(exc).__name__, "message": str(exc)}}


def _problem_echo(args, big_m):
    return {"k": args.k, "n": args.n, "r": args.r, "h": args.h,
            "f": args.f, "boundary": args.boundary, "big_m": big_m}


def _cmd_verify(args):
    results = verification.run_all()
    if args.json:
        payload = [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]
        _emit(args, {"suites": payload, "passed": all(r.passed for r in results)})
    else:
        for r in results:
            mark = "PASS" if r.passed else "FAIL"
            stamp = f" [{r.seconds:.2f}s]" if args.timings else ""
            print(f"{mark} {r.name}: {r.detail}{stamp}")
        n_bad = sum(not r.passed for r in results)
        print(f"{len(results) - n_bad}/{len(results)} suites passed")
    return 0 if all(r.passed for r in results) else 1


def _cmd_constants(args):
    f = _parse_rhs(args.f)
    n = args.n if args.n is not None else args.k
    eps = args.eps if args.eps is not None else args.r / 2.0
    params = PogorelovParams.standard(n, args.k, args.r, eps)
    phi = PogorelovUpper(params)
    consts = choose_lambda_star(f, phi, k=args.k)
    payload = {
        "alpha": params.alpha,
        "M": params.big_m,
        "lambda_star": consts.lambda_star,
        "E": consts.E,
        "L": consts.L,
        "r0": consts.r0,
        "eps0": consts.eps0,
        "c_star": consts.c_star,
        "chosen_r": choose_r(f, args.k),
    }
    _emit(args, payload)
    return 0


def _run_single_solve(args, config):
    f = _parse_rhs(args.f)
    grid = build_grid(args.n, args.r, args.h)
    big_m = None
    if args.boundary == _PHI_EPS:
        params = PogorelovParams.standard(args.n, args.k, args.r, args.eps)
        big_m = params.big_m
    else:
        params = None
    boundary = _boundary_callable(args.boundary, params)
    solution, report = solve_regularized(args.k, args.eps, f, boundary, grid, config=config)
    return solution, report, big_m


def _cmd_solve(args):
    config = SolverConfig.from_file(args.config) if args.config else SolverConfig()
    solution, report, big_m = _run_single_solve(args, config)
    write_solution_csv(f"{args.out}.csv", solution)
    payload = {"problem": dict(_problem_echo(args, big_m), eps=args.eps),
               "report": report.to_dict(), "config": config.to_dict()}
    write_report_json(f"{args.out}.report.json", payload)
    _emit(args, payload)
    return 0


def _cmd_continue(args):
    config = SolverConfig.from_file(args.config) if args.config else SolverConfig()
    schedule = [float(x) for x in args.schedule.split(",")]
    f = _parse_rhs(args.f)
    grid = build_grid(args.n, args.r, args.h)
    big_m = None
    if args.boundary == _PHI_EPS:
        big_m = choose_M(args.r, args.k)

    def boundary_for(eps):
        if args.boundary == _PHI_EPS:
            return PogorelovUpper(PogorelovParams.standard(args.n, args.k, args.r, eps)).value
        return _boundary_callable(args.boundary, None)

    # the phi_eps datum tracks the stage eps, so run stages manually when needed
    if args.boundary == _PHI_EPS:
        from .solver import ContinuationResult
        result = ContinuationResult(eps_values=[], solutions=[], reports=[],
                                    lipschitz_values=[], lipschitz_flag=False, stage_gaps=[])
        warm = None
        for stage, eps in enumerate(schedule):
            try:
                sol, rep = solve_regularized(args.k, eps, f, boundary_for(eps), grid,
                                             config=config, warm_start=warm)
            except ConvergenceError as exc:
                result.failed_stage = stage
                result.message = f"stage {stage} (eps={eps}) failed: {exc}"
                break
            if warm is not None:
                result.stage_gaps.append(float(np.max(np.abs(sol.values - warm.values))))
            result.eps_values.append(eps)
            result.solutions.append(sol)
            result.reports.append(rep)
            result.lipschitz_values.append(rep.lipschitz_estimate)
            warm = sol
        if result.lipschitz_values:
            first = result.lipschitz_values[0]
            result.lipschitz_flag = any(v > 2.0 * first for v in result.lipschitz_values)
    else:
        result = continuation_in_eps(args.k, f, boundary_for(None), grid, schedule, config=config)

    for eps, sol in zip(result.eps_values, result.solutions):
        write_solution_csv(f"{args.out}.eps{eps:.6g}.csv", sol)
    payload = {
        "problem": dict(_problem_echo(args, big_m), schedule=schedule),
        "stages": [rep.to_dict() for rep in result.reports],
        "lipschitz_values": result.lipschitz_values,
        "lipschitz_flag": result.lipschitz_flag,
        "stage_gaps": result.stage_gaps,
        "failed_stage": result.failed_stage,
        "config": config.to_dict(),
    }
    write_report_json(f"{args.out}.report.json", payload)
    _emit(args, payload)
    if result.failed_stage is not None:
        raise ConvergenceError(result.message)
    return 0


def _load_solution(args):
    report_path = args.report or args.solution.replace(".csv", "") + ".report.json"
    report = load_report_json(report_path)
    grid = grid_from_report(report)
    solution = read_solution_csv(args.solution, grid)
    return solution, report


def _barrier_params_from_report(report, eps=None):
    prm = report["problem"]
    if prm.get("big_m") is None:
        raise DomainError("stored solve did not use the barrier datum; no envelope parameters")
    eps = float(report["report"]["eps"]) if eps is None and "report" in report else eps
    return PogorelovParams(n=int(prm["n"]), k=int(prm["k"]), r=float(prm["r"]),
                           eps=float(eps), big_m=float(prm["big_m"]))


def _cmd_sandwich(args):
    solution, report = _load_solution(args)
    params = _barrier_params_from_report(report, eps=args.eps)
    lower = PogorelovLower(params)
    upper = PogorelovUpper(params)
    res = compare(solution, lower.value, upper.value, c_slack=10.0 * params.big_m)
    payload = {"min_lower_gap": res.min_lower_gap, "min_upper_gap": res.min_upper_gap,
               "slack": res.slack, "passed": res.passed,
               "worst_lower": res.worst_lower, "worst_upper": res.worst_upper}
    _emit(args, payload)
    return 0 if res.passed else 1


def _default_axis(report):
    # first real coordinate of z' (the singular direction): x_2 has index 1
    n = int(report["problem"]["n"])
    return 1 if n >= 2 else 0


def _cmd_holder(args):
    solution, report = _load_solution(args)
    axis = args.axis if args.axis is not None else _default_axis(report)
    prof = axis_profile(solution, axis=axis)
    try:
        params = _barrier_params_from_report(report, eps=args.eps)
        prof.with_params(params)
    except DomainError:
        pass
    fit = holder_fit(prof, t_min=args.tmin, t_max=args.tmax)
    payload = {"exponent_hat": fit.exponent_hat, "ci_halfwidth": fit.ci_halfwidth,
               "window": list(fit.window), "n_samples": fit.n_samples,
               "passed_sandwich": fit.passed_sandwich, "axis": axis}
    _emit(args, payload)
    return 0


def _cmd_kink(args):
    solution, report = _load_solution(args)
    axis = args.axis if args.axis is not None else _default_axis(report)
    prof = axis_profile(solution, axis=axis)
    rep = kink_detector(prof)
    payload = {"right_slope": rep.right_slope, "left_slope": rep.left_slope,
               "gap": rep.gap, "t_right": rep.t_right, "t_left": rep.t_left, "axis": axis}
    _emit(args, payload)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(prog="khessian",
                                     description="complex k-Hessian toolkit")
    parser.add_argument("--json", action="store_true",
                        help="emit machine-readable error JSON on failures")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run all formula/invariant suites")
    p.add_argument("--timings", action="store_true", help="append wall-clock times (non-deterministic)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("constants", help="print derived barrier constants as JSON")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--f", default="constant:1.0")
    p.add_argument("--eps", type=float, default=None)
    p.set_defaults(func=_cmd_constants)

    def solve_args(p):
        p.add_argument("--k", type=int, default=2)
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--r", type=float, required=True)
        p.add_argument("--h", type=float, required=True)
        p.add_argument("--f", default="constant:1.0")
        p.add_argument("--boundary", default=_ZERO,
                       help="zero | phi_eps | import:module:attr")
        p.add_argument("--config", default=None, help="key = value solver config file")
        p.add_argument("--out", required=True, help="output prefix for CSV/JSON")

    p = sub.add_parser("solve", help="solve the regularized Dirichlet problem")
    solve_args(p)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("continue", help="eps-continuation along a schedule")
    solve_args(p)
    p.add_argument("--schedule", required=True, help="comma-separated decreasing eps values")
    p.set_defaults(func=_cmd_continue)

    def analysis_args(p):
        p.add_argument("--solution", required=True, help="solution CSV written by solve")
        p.add_argument("--report", default=None, help="report JSON (default: <solution>.report.json)")
        p.add_argument("--eps", type=float, default=None, help="barrier eps override")

    p = sub.add_parser("sandwich", help="compare a solution against the barrier envelopes")
    analysis_args(p)
    p.set_defaults(func=_cmd_sandwich)

    p = sub.add_parser("holder", help="fit the growth exponent of an axis profile")
    analysis_args(p)
    p.add_argument("--axis", type=int, default=None)
    p.add_argument("--tmin", type=float, default=None)
    p.add_argument("--tmax", type=float, default=None)
    p.set_defaults(func=_cmd_holder)

    p = sub.add_parser("kink", help="one-sided slopes at the origin of an axis profile")
    analysis_args(p)
    p.add_argument("--axis", type=int, default=None)
    p.set_defaults(func=_cmd_kink)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        if args.json:
            print(json.dumps(_error_payload(exc), sort_keys=True))
        else:
            print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        if args.json:
            print(json.dumps(_error_payload(exc), sort_keys=True))
        else:
            print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except KHessianError as exc:
        if args.json:
            print(json.dumps(_error_payload(exc), sort_keys=True))
        else:
            print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
