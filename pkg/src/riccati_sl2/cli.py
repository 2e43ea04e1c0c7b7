"""Command-line front end: problem files in, classification reports and
trajectory CSVs out, plus a verify mode that cross-validates every
reduction against the direct integrator.

A problem file is JSON:

    {
      "schema": 1,
      "coefficients": {"b0": "1", "b1": "0", "b2": "-1"},
      "t_interval": [0.0, 2.0],
      "initial_conditions": [0.0, "inf"],
      "options": {"step": 0.001, "grid": 101, "tol": 1e-6},
      "hints": {"Zh99E": {"E": "t", "D": "1", "a": 1, "b": 1, "c": 1}},
      "known_solutions": ["1", "-1"]
    }

Coefficients and hint functions use the expression grammar of
:mod:`riccati_sl2.expr`.  Output JSON is byte-stable across runs: fixed
key order and floats printed with 17 significant digits.  Exit codes:
0 success, 1 verification/runtime failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .criteria import classify, solve_via_report
from .expr import (Expr, EvalDomainError, ParseError, QuadratureError, T,
                   evaluate, parse)
from .projline import CoincidentPointsError, ExtReal, INF, cross_ratio
from .riccati import RiccatiEquation, integrate_direct
from .sl2 import (OneDimensionalTarget, algebra_curve_from_riccati,
                  integrate_group_equation, reconstruct_solution)
from .solvers import ResidualError, verify_particular_solution
from .transform import (CurveSL2, gauge_transform_algebra, theta_apply,
                        transform_coefficients)

__all__ = ["main", "load_problem", "cmd_solve", "cmd_classify", "cmd_verify",
           "Problem", "InputError"]

log = logging.getLogger("riccati_sl2")

_HINT_CONSTANT_KEYS = {"a", "b", "c", "k"}
_HINT_DETECTORS = {"RU68", "Zh99Basic", "Zh99E"} | {
    f"Zh99Table{i}" for i in range(1, 7)}

# Comparison cap: points with |x| above this sit next to a crossing
# through infinity and are excluded from relative comparisons.
_COMPARE_CAP = 10.0


class InputError(Exception):
    pass


@dataclass
class Problem:
    equation: RiccatiEquation
    t_interval: tuple[float, float]
    initial_conditions: list[ExtReal]
    step: float
    grid_n: int
    tol: float
    hints: dict
    known_solutions: list[Expr]

    def grid(self) -> list[float]:
        ta, tb = self.t_interval
        n = self.grid_n
        return [ta + i * (tb - ta) / (n - 1) for i in range(n)]


def _parse_expr(text, where: str) -> Expr:
    if not isinstance(text, str):
        raise InputError(f"{where}: expected an expression string")
    try:
        return parse(text)
    except ParseError as exc:
        raise InputError(f"{where}: {exc}") from exc


def load_problem(path, overrides=None) -> Problem:
    """Read and validate a problem file; command-line overrides (step,
    grid, tol) win over the file's options block."""
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: problem file must be a JSON object")
    coeff = doc.get("coefficients")
    if not isinstance(coeff, dict):
        raise InputError(f"{path}: missing 'coefficients' object")
    exprs = {}
    for key in ("b0", "b1", "b2"):
        if key not in coeff:
            raise InputError(f"{path}: coefficients.{key} missing")
        exprs[key] = _parse_expr(coeff[key], f"coefficients.{key}")
    eq = RiccatiEquation(exprs["b0"], exprs["b1"], exprs["b2"])

    interval = doc.get("t_interval")
    if (not isinstance(interval, list) or len(interval) != 2
            or not all(isinstance(v, (int, float)) for v in interval)):
        raise InputError(f"{path}: t_interval must be [t_a, t_b]")
    ta, tb = float(interval[0]), float(interval[1])
    if not ta < tb:
        raise InputError(f"{path}: t_interval must be increasing")

    ics_raw = doc.get("initial_conditions")
    if not isinstance(ics_raw, list) or not ics_raw:
        raise InputError(f"{path}: initial_conditions must be a non-empty list")
    ics = []
    for i, v in enumerate(ics_raw):
        if isinstance(v, (int, float)) and math.isfinite(v):
            ics.append(ExtReal(float(v)))
        elif v == "inf":
            ics.append(INF)
        else:
            raise InputError(
                f"{path}: initial_conditions[{i}] must be a finite number or \"inf\"")

    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise InputError(f"{path}: options must be an object")
    step = options.get("step", 1e-3)
    grid_n = options.get("grid", 101)
    tol = options.get("tol", 1e-6)
    if overrides is not None:
        if getattr(overrides, "step", None) is not None:
            step = overrides.step
        if getattr(overrides, "grid", None) is not None:
            grid_n = overrides.grid
        if getattr(overrides, "tol", None) is not None:
            tol = overrides.tol
    if not (isinstance(step, (int, float)) and step > 0):
        raise InputError(f"{path}: step must be positive")
    if not (isinstance(grid_n, int) and grid_n >= 2):
        raise InputError(f"{path}: grid must be an integer >= 2")
    if not (isinstance(tol, (int, float)) and tol > 0):
        raise InputError(f"{path}: tol must be positive")

    hints_raw = doc.get("hints", {})
    if not isinstance(hints_raw, dict):
        raise InputError(f"{path}: hints must be an object")
    hints = {}
    for name, block in hints_raw.items():
        if name not in _HINT_DETECTORS:
            raise InputError(f"{path}: hints.{name}: unknown detector "
                             f"(expected one of {sorted(_HINT_DETECTORS)})")
        if not isinstance(block, dict):
            raise InputError(f"{path}: hints.{name} must be an object")
        parsed = {}
        for key, value in block.items():
            if key in _HINT_CONSTANT_KEYS:
                if not isinstance(value, (int, float)):
                    raise InputError(f"{path}: hints.{name}.{key} must be a number")
                parsed[key] = float(value)
            else:
                parsed[key] = _parse_expr(value, f"hints.{name}.{key}")
        hints[name] = parsed

    known_raw = doc.get("known_solutions", [])
    if not isinstance(known_raw, list):
        raise InputError(f"{path}: known_solutions must be a list")
    known = [_parse_expr(s, f"known_solutions[{i}]")
             for i, s in enumerate(known_raw)]

    return Problem(equation=eq, t_interval=(ta, tb),
                   initial_conditions=ics, step=float(step),
                   grid_n=grid_n, tol=float(tol), hints=hints,
                   known_solutions=known)


# Deterministic JSON: fixed key order (construction order) and floats
# with 17 significant digits.

def _fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _dumps(obj, level: int = 0) -> str:
    pad = "  " * level
    inner = "  " * (level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dumps(v, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_dumps(v, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _curve_json(curve: CurveSL2 | None):
    if curve is None:
        return None
    return {"alpha": str(curve.alpha), "beta": str(curve.beta),
            "gamma": str(curve.gamma), "delta": str(curve.delta)}


def _target_json(target):
    if target is None:
        return None
    if isinstance(target, OneDimensionalTarget):
        return {"kind": "one_dimensional",
                "c": [target.c0, target.c1, target.c2],
                "rate": str(target.rate)}
    eq = target.equation
    return {"kind": "affine_solvable",
            "b0": str(eq.b0), "b1": str(eq.b1), "b2": str(eq.b2)}


def _report_json(report):
    doc = {
        "name": report.name,
        "satisfied": report.satisfied,
        "constants": {k: float(v) for k, v in report.constants.items()},
        "functions": {k: str(v) for k, v in report.functions.items()},
        "curve": _curve_json(report.curve),
        "target": _target_json(report.target),
        "diagnostics": dict(report.diagnostics),
    }
    if report.alternates:
        doc["alternates"] = [
            {"curve": _curve_json(c), "target": _target_json(t)}
            for c, t in report.alternates]
    return doc


def _problem_json(problem: Problem):
    eq = problem.equation
    return {
        "b0": str(eq.b0), "b1": str(eq.b1), "b2": str(eq.b2),
        "t_interval": [problem.t_interval[0], problem.t_interval[1]],
        "initial_conditions": [str(x) for x in problem.initial_conditions],
        "step": problem.step, "grid": problem.grid_n, "tol": problem.tol,
    }


def _sample_expr(e: Expr, ts) -> list[ExtReal]:
    out = []
    for t in ts:
        try:
            out.append(ExtReal(evaluate(e, t)))
        except EvalDomainError as exc:
            if exc.kind == "division by zero":
                out.append(INF)
            else:
                raise
    return out


def _comparable(x: ExtReal) -> bool:
    return not x.is_inf and abs(x.value) <= _COMPARE_CAP


def _points_dev(xs_a, xs_b) -> float:
    """Max relative deviation over samples where both sides are finite
    and away from crossings through infinity."""
    worst = 0.0
    compared = 0
    for a, b in zip(xs_a, xs_b):
        if _comparable(a) and _comparable(b):
            compared += 1
            worst = max(worst, abs(a.value - b.value)
                        / (1.0 + max(abs(a.value), abs(b.value))))
    if compared == 0:
        return math.inf
    return worst


def cmd_classify(problem: Problem, args) -> int:
    reports = classify(problem.equation, problem.grid(), problem.tol,
                       problem.hints)
    doc = {
        "schema": 1,
        "command": "classify",
        "problem": _problem_json(problem),
        "reports": [_report_json(r) for r in reports],
    }
    print(_dumps(doc))
    return 0


def cmd_solve(problem: Problem, args) -> int:
    reports = classify(problem.equation, problem.grid(), problem.tol,
                       problem.hints)
    chosen = None
    wanted = getattr(args, "criterion", None)
    if wanted:
        matches = [r for r in reports if r.name == wanted]
        if not matches:
            raise InputError(f"criterion {wanted!r} was not run "
                             "(unknown name or missing hint)")
        if not matches[0].satisfied:
            raise InputError(f"criterion {wanted!r} is not satisfied: "
                             f"{matches[0].diagnostics.get('reason', '')}")
        chosen = matches[0]
    else:
        chosen = next((r for r in reports if r.satisfied), None)
    if chosen is not None:
        log.debug("solving via %s", chosen.name)
    else:
        log.debug("no reduction found; falling back to direct integration")

    outdir = Path(getattr(args, "output", ".") or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, x0 in enumerate(problem.initial_conditions):
        if chosen is not None:
            traj = solve_via_report(problem.equation, chosen, x0,
                                    problem.t_interval, problem.step)
        else:
            traj = integrate_direct(problem.equation, x0,
                                    problem.t_interval, problem.step)
        fname = f"trajectory_{i}.csv"
        (outdir / fname).write_text(traj.to_csv_text())
        entries.append({"initial_condition": str(x0), "file": fname,
                        "samples": len(traj)})
    doc = {
        "schema": 1,
        "command": "solve",
        "criterion": chosen.name if chosen is not None else None,
        "no_reduction_found": chosen is None,
        "trajectories": entries,
        "reports": [_report_json(r) for r in reports],
    }
    print(_dumps(doc))
    return 0


def cmd_verify(problem: Problem, args) -> int:
    eq = problem.equation
    grid = problem.grid()
    span = problem.t_interval
    ta = span[0]
    step = problem.step
    checks = []

    def add(name, dev, tol):
        checks.append({"name": name, "max_deviation": dev,
                       "tolerance": tol, "passed": bool(dev <= tol)})

    for x1 in problem.known_solutions:
        try:
            verify_particular_solution(eq, x1, grid)
        except ResidualError as exc:
            raise InputError(f"known solution '{x1}' fails the equation: {exc}")

    reports = classify(eq, grid, problem.tol, problem.hints)
    satisfied = [r for r in reports if r.satisfied]

    # Hinted detectors: their printed conditions must hold as stated.
    by_name = {r.name: r for r in reports}
    for name in problem.hints:
        rep = by_name.get(name)
        if rep is None:
            continue
        dev = rep.diagnostics.get("max_dev")
        if dev is None:
            dev = 0.0 if rep.satisfied else math.inf
        add(f"criterion[{name}]", dev, problem.tol)

    # Solution equivariance of each satisfied criterion's curve.
    x0 = problem.initial_conditions[0]
    base = integrate_direct(eq, x0, span, step)
    for r in satisfied:
        eq2 = transform_coefficients(eq, r.curve)
        x0p = theta_apply(r.curve, ta, x0)
        image = integrate_direct(eq2, x0p, span, step)
        mapped = [theta_apply(r.curve, t, x)
                  for t, x in zip(base.ts, base.xs)]
        add(f"equivariance[{r.name}]", _points_dev(mapped, image.xs), 1e-6)

    # Gauge law versus coefficient law, on each reducing curve (or on an
    # elementary curve when nothing is satisfied).
    pairs = [(r.name, r.curve) for r in satisfied] or [
        ("translation", CurveSL2.translation(T))]
    a = algebra_curve_from_riccati(eq)
    for name, c in pairs:
        g1 = gauge_transform_algebra(a, c)
        g2 = algebra_curve_from_riccati(transform_coefficients(eq, c))
        dev = 0.0
        for t in grid:
            for lhs, rhs_ in ((g1.b0, g2.b0), (g1.b1, g2.b1), (g1.b2, g2.b2)):
                lv = evaluate(lhs, t)
                rv = evaluate(rhs_, t)
                dev = max(dev, abs(lv - rv) / (1.0 + abs(lv) + abs(rv)))
        add(f"gauge_consistency[{name}]", dev, 1e-9)

    # Group-equation reconstruction against the direct oracle.
    G = integrate_group_equation(a, span, step)
    for i, xi in enumerate(problem.initial_conditions):
        rec = reconstruct_solution(G, xi)
        direct = integrate_direct(eq, xi, span, step)
        add(f"reconstruction[{i}]", _points_dev(rec.xs, direct.xs), 1e-6)

    # Cross-ratio constancy, when three reference solutions are available
    # besides the probe.
    refs = [_sample_expr(k, base.ts) for k in problem.known_solutions]
    for xi in problem.initial_conditions[1:]:
        refs.append(integrate_direct(eq, xi, span, step).xs)
    if len(refs) >= 3:
        ratios = []
        for idx in range(len(base.ts)):
            try:
                cr = cross_ratio(base.xs[idx], refs[0][idx], refs[1][idx],
                                 refs[2][idx])
            except CoincidentPointsError:
                continue
            if not cr.is_inf:
                ratios.append(cr.value)
        if len(ratios) >= len(base.ts) // 2:
            mid = sorted(ratios)[len(ratios) // 2]
            dev = max(abs(v - mid) for v in ratios) / (1.0 + abs(mid))
            add("cross_ratio_constancy", dev, 1e-6)

    passed = all(c["passed"] for c in checks)
    doc = {
        "schema": 1,
        "command": "verify",
        "problem": _problem_json(problem),
        "checks": checks,
        "passed": passed,
    }
    print(_dumps(doc))
    return 0 if passed else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riccati-sl2",
        description="Solve and classify time-dependent Riccati equations "
                    "through SL(2,R)-valued curve transformations.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("problem", help="problem file (JSON)")
    common.add_argument("--step", type=float, default=None,
                        help="integrator step override")
    common.add_argument("--grid", type=int, default=None,
                        help="detection grid size override")
    common.add_argument("--tol", type=float, default=None,
                        help="detection tolerance override")
    common.add_argument("--output", default=".",
                        help="output directory for CSV files")
    sub = parser.add_subparsers(dest="command", required=True)
    solve = sub.add_parser("solve", parents=[common],
                           help="classify, reduce, and write trajectories")
    solve.add_argument("--criterion", default=None,
                       help="force a particular detector by name")
    sub.add_parser("classify", parents=[common],
                   help="run the detectors and print the report")
    sub.add_parser("verify", parents=[common],
                   help="cross-validate reductions against the direct oracle")
    return parser


_COMMANDS = {"solve": cmd_solve, "classify": cmd_classify, "verify": cmd_verify}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    level = os.environ.get("RICCATI_LOG")
    if level:
        logging.basicConfig(
            stream=sys.stderr,
            level=getattr(logging, level.upper(), logging.DEBUG))
    try:
        problem = load_problem(args.problem, args)
        return _COMMANDS[args.command](problem, args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EvalDomainError, QuadratureError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
