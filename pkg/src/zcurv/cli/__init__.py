"""Command-line front end: ``zcurv run <file>``."""

from __future__ import annotations

import argparse
import sys

from ..errors import ProblemFileError
from .problem import ProblemFile, Task, load, load_data, shipped
from .runner import Options, run, run_task
from .schema import TASK_KINDS

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zcurv", description="Verify zero-curvature representations.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the tasks of a problem file")
    r.add_argument("file", help="problem file (JSON); bare names also resolve to shipped files")
    r.add_argument("--task", default="all", help=f"task kind ({', '.join(TASK_KINDS)}), task name, or 'all'")
    r.add_argument("--format", choices=("human", "json"), default="human")
    r.add_argument("--parallel", action="store_true", help="run independent tasks concurrently")
    r.add_argument("--grid", nargs=2, type=int, metavar=("NX", "NY"), help="override grid node counts")
    r.add_argument("--tol", type=float, help="override upper tolerances of numeric tasks")
    r.add_argument("--timing", action="store_true", help="include wall time in the output")
    r.add_argument("--workers", type=int, default=1, help="threads for column transport")
    return ap


def _resolve(name: str):
    from pathlib import Path

    p = Path(name)
    if p.exists():
        return p
    cand = shipped(name if name.endswith(".json") else name + ".json")
    return cand if cand.exists() else p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        pf = load(_resolve(args.file))
    except ProblemFileError as exc:
        print(f"zcurv: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.grid and min(args.grid) < 2:
        print("zcurv: input error: --grid needs at least 2 nodes per direction", file=sys.stderr)
        return EXIT_INPUT
    opts = Options(grid=args.grid, tol=args.tol, workers=max(1, args.workers))

    def emit(rep):
        if args.format == "json":
            print(rep.to_json(timing=args.timing), flush=True)
        else:
            line = rep.summary()
            if args.timing and rep.wall_time is not None:
                line += f"\n    wall time: {rep.wall_time:.3f} s"
            print(line, flush=True)

    try:
        reports, code = run(pf, args.task, args.parallel, opts, on_report=emit)
    except BrokenPipeError:
        sys.stderr.close()
        return EXIT_FAIL
    if not reports:
        print(f"zcurv: input error: no task matches {args.task!r}", file=sys.stderr)
        return EXIT_INPUT
    if args.format == "human":
        npass = sum(r.passed for r in reports)
        print(f"{npass}/{len(reports)} passed")
    return code


__all__ = ["Options", "ProblemFile", "Task", "load", "load_data", "main", "run", "run_task", "shipped"]
