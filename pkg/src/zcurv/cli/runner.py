"""Dispatch of problem-file tasks to the verification routines."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from ..connection import (associated_check, jacobi_check, lie_identity_check, zero_curvature_check)
from ..errors import ZcurvError
from ..exterior import substitute
from ..numeric import Grid, integrate_backlund, integrate_lax, residual_scan, to_sympy
from ..report import VerificationReport
from ..transforms import (backlund_cross_check, closure_check, lax_compatibility, lax_pair,
                          riccati_form)
from .problem import ProblemFile, Task


class Options:
    def __init__(self, grid=None, tol=None, workers: int = 1):
        self.grid = grid
        self.tol = tol
        self.workers = workers


def _grid(pf: ProblemFile, name: str, opts: Options) -> Grid:
    g = pf.grids[name]
    if opts.grid:
        g = replace(g, nx=int(opts.grid[0]), ny=int(opts.grid[1]))
    return g


def _upper(task: Task, key: str, opts: Options):
    v = task.params.get(key)
    if v is None:
        return None
    return opts.tol if opts.tol is not None else v


def _bound(rep: VerificationReport, metric: str, value: float, upper=None, lower=None):
    rep.metrics[metric] = value
    if upper is not None:
        rep.metrics[f"{metric}_bound"] = upper
        if not value <= upper:
            rep.fail(f"{metric} {value:.3e} exceeds {upper:.3e}")
    if lower is not None:
        rep.metrics[f"{metric}_floor"] = lower
        if not value > lower:
            rep.fail(f"{metric} {value:.3e} does not exceed {lower:.3e}")


def _jacobi(pf, t, opts):
    return [jacobi_check(pf.constants[t.params["constants"]], t.name)]


def _lie(pf, t, opts):
    xi = pf.xi[t.params["xi"]]
    reps = [lie_identity_check(xi, pf.constants[t.params["constants"]], t.name)]
    if "system" in t.params:
        target = pf.pdes.get(t.params.get("pde"))
        reps.append(associated_check(xi, pf.systems[t.params["system"]], target, t.name + ":associated"))
    return reps


def _zero_curvature(pf, t, opts):
    return [zero_curvature_check(pf.systems[t.params["system"]], pf.pdes[t.params["pde"]], t.name)]


def _lax(pf, t, opts):
    p = lax_pair(pf.gamma[t.params["gamma"]])
    return [lax_compatibility(p, pf.pdes[t.params["pde"]], t.name, t.params.get("display"))]


def _lax_numeric(pf, t, opts):
    rep = VerificationReport(t.name, "lax-numeric")
    p = lax_pair(pf.gamma[t.params["gamma"]])
    loop = t.params.get("loop", [0.0, 0.0, 1.0, 1.0])
    steps = t.params.get("steps", 1000)
    if opts.grid:
        steps = int(opts.grid[0]) - 1
    r = integrate_lax(p, pf.solutions[t.params["solution"]], tuple(loop), steps)
    rep.metrics["steps"] = steps
    _bound(rep, "monodromy_defect", r.defect, _upper(t, "max_defect", opts), t.params.get("min_defect"))
    return [rep]


def _riccati(pf, t, opts):
    rep = VerificationReport(t.name, "riccati")
    eq, sys = riccati_form(pf.systems[t.params["system"]], pf.patterns[t.params["pattern"]])
    rep.extracted["tau"] = str(eq.tau)
    ctx = sys.chart.jet_context
    for k, e in enumerate(sys.rhs):
        rep.extracted[sys.derivative(k)] = str(e)
    expect = t.params.get("expect")
    if expect:
        if len(expect) != len(sys.rhs):
            rep.error("expected right-hand sides do not match the base dimension")
            return [rep]
        for k, (got, want) in enumerate(zip(sys.rhs, expect)):
            want = sys.chart.parse(want)
            if got != want:
                rep.residuals[sys.derivative(k)] = str(got - want)
                rep.fail(f"{sys.derivative(k)} differs from the expected right-hand side")
    return [rep]


def _backlund(pf, t, opts):
    names = t.params["systems"]
    systems = [pf.backlund[n] for n in names]
    if len(systems) > 2:
        rep = VerificationReport(t.name, "backlund")
        rep.error("at most two systems can be cross-checked together")
        return [rep]
    targets = {k: pf.pdes[v] for k, v in t.params["targets"].items()}
    rep = backlund_cross_check(systems[0], systems[1] if len(systems) > 1 else None, targets, task=t.name)
    for n, s in zip(names, systems):
        rep.extracted[f"system {n}"] = str(s)
    return [rep]


def _backlund_numeric(pf, t, opts):
    rep = VerificationReport(t.name, "backlund-numeric")
    sys = pf.backlund[t.params["system"]]
    grid = _grid(pf, t.params["grid"], opts)
    known = pf.solutions[t.params["solution"]]
    initial = t.params.get("initial", 0.0)
    w0 = float(to_sympy(str(initial), {}).evalf()) if isinstance(initial, str) else float(initial)
    r = integrate_backlund(sys, known, w0, grid, workers=opts.workers)
    rep.metrics["nodes"] = grid.nx * grid.ny
    _bound(rep, "consistency_defect", r.defect, _upper(t, "max_defect", opts), t.params.get("min_defect"))
    if "compare" in t.params:
        import numpy as np
        ref = pf.solutions[t.params["compare"]]
        X, Y = grid.mesh()
        err = float(np.max(np.abs(r.field.values - ref.values(sys.unknown, X, Y))))
        _bound(rep, "max_error", err, _upper(t, "max_error", opts))
    return [rep]


def _closure(pf, t, opts):
    f = pf.frames[t.params["frame"]]
    return [closure_check(f.tau, f.structure, f.mod, task=t.name)]


def _residual_scan(pf, t, opts):
    rep = VerificationReport(t.name, "residual-scan")
    pde = pf.pdes[t.params["pde"]]
    r = residual_scan(pde, pf.solutions[t.params["solution"]], _grid(pf, t.params["grid"], opts))
    rep.extracted["pde"] = str(pde.F)
    rep.extracted["location"] = f"({r.location[0]!r}, {r.location[1]!r})"
    _bound(rep, "max_abs_residual", r.max_abs, _upper(t, "max_residual", opts), t.params.get("min_residual"))
    return [rep]


HANDLERS = {
    "jacobi": _jacobi,
    "lie": _lie,
    "zero-curvature": _zero_curvature,
    "lax": _lax,
    "lax-numeric": _lax_numeric,
    "riccati": _riccati,
    "backlund": _backlund,
    "backlund-numeric": _backlund_numeric,
    "closure": _closure,
    "residual-scan": _residual_scan,
}


def run_task(pf: ProblemFile, t: Task, opts: Options | None = None) -> list:
    opts = opts or Options()
    start = time.perf_counter()
    try:
        reps = HANDLERS[t.kind](pf, t, opts)
    except (ZcurvError, ValueError, KeyError, ArithmeticError) as exc:
        rep = VerificationReport(t.name, t.kind)
        rep.error(f"{type(exc).__name__}: {exc}")
        reps = [rep]
    elapsed = time.perf_counter() - start
    for r in reps:
        r.wall_time = elapsed
    return reps


def select(pf: ProblemFile, task_filter: str | None = None) -> list:
    if task_filter in (None, "all"):
        return list(pf.tasks)
    return [t for t in pf.tasks if t.kind == task_filter or t.name == task_filter]


def run(pf: ProblemFile, task_filter: str | None = None, parallel: bool = False,
        opts: Options | None = None, on_report=None):
    """Run the selected tasks in declaration order; returns ``(reports, exit_code)``."""
    opts = opts or Options()
    tasks = select(pf, task_filter)
    reports = []
    if parallel and len(tasks) > 1:
        with ThreadPoolExecutor() as pool:
            for reps in pool.map(lambda t: run_task(pf, t, opts), tasks):
                reports.extend(reps)
                if on_report:
                    for r in reps:
                        on_report(r)
    else:
        for t in tasks:
            reps = run_task(pf, t, opts)
            reports.extend(reps)
            if on_report:
                for r in reps:
                    on_report(r)
    code = 0 if reports and all(r.passed for r in reports) else 1
    return reports, code
