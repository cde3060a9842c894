"""Residual scans and RK4 transport through Backlund and Lax systems."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..connection import PdeResidual
from ..errors import ExcludedNodeError, NumericError, TransportOverflowError
from ..transforms import BacklundSystem, LaxPair
from . import backend
from .grid import Grid, GridField
from .program import compile_expr, evaluate_array
from .solutions import KnownSolution


def _excluded_mask(grid: Grid, known: KnownSolution | None, X, Y):
    mask = np.zeros(X.shape, dtype=bool)
    if grid is not None and grid.exclude is not None:
        mask |= np.asarray(grid.exclude(X, Y), dtype=bool)
    if known is not None:
        mask |= known.excluded(X, Y)
    return mask


def _field_stack(atoms, known: KnownSolution | None, X, Y, base):
    rows = []
    for a in atoms:
        if a in base:
            rows.append(X if a == base[0] else Y)
        else:
            if known is None:
                raise NumericError(f"atom {a!r} needs a known solution")
            rows.append(known.values(a, X, Y))
    if not rows:
        return np.zeros((1,) + X.shape)
    return np.ascontiguousarray(np.stack(rows), dtype=np.float64)


def _first_bad(mask, X, Y):
    i, j = np.argwhere(mask)[0]
    return float(X[i, j]), float(Y[i, j])


@dataclass
class ScanResult:
    max_abs: float
    location: tuple

    def __iter__(self):
        return iter((self.max_abs, self.location))


def residual_scan(pde: PdeResidual, solution: KnownSolution, grid: Grid) -> ScanResult:
    """Evaluate ``F`` on the closed form at every node; report the max and where it occurs."""
    X, Y = grid.mesh()
    mask = _excluded_mask(grid, solution, X, Y)
    if mask.any():
        raise ExcludedNodeError(f"node {_first_bad(mask, X, Y)} is excluded from the domain")
    atoms = sorted(pde.F.atoms())
    prog = compile_expr(pde.F, None, atoms)
    F = _field_stack(atoms, solution, X, Y, solution.base)
    with np.errstate(all="ignore"):
        vals = evaluate_array(prog, F)
    bad = ~np.isfinite(vals)
    if bad.any():
        raise ExcludedNodeError(f"residual is not finite at node {_first_bad(bad, X, Y)}")
    a = np.abs(vals)
    i, j = np.unravel_index(int(np.argmax(a)), a.shape)
    return ScanResult(float(a[i, j]), (float(X[i, j]), float(Y[i, j])))


@dataclass
class BacklundResult:
    field: GridField
    transposed: GridField
    defect: float
    backend: str


def _sweep_lines(kern, prog, F, axis, starts, n, h, lines, workers):
    """Integrate independent lines; line ``k`` sits at half index ``2 * k``."""
    outs = [np.empty(n + 1) for _ in lines]

    def run(k):
        return kern.sweep(prog, F, axis, 2 * lines[k], 0, n, h, float(starts[k]), outs[k])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            bads = list(pool.map(run, range(len(lines))))
    else:
        bads = [run(k) for k in range(len(lines))]
    return outs, bads


def integrate_backlund(sys: BacklundSystem, known: KnownSolution | None, w0: float, grid: Grid,
                       workers: int = 1, kernels=None) -> BacklundResult:
    """RK4 transport of ``sys.unknown`` from ``(x0, y0)`` in both edge orders.

    The x-then-y field is returned; ``defect`` is the largest node-wise
    difference to the y-then-x field.
    """
    kern = kernels or backend.kernels
    base = sys.chart.base
    P, Q = sys.rhs
    atoms = sorted((P.atoms() | Q.atoms()) - {sys.unknown})
    X, Y = grid.mesh(half=True)
    mask = _excluded_mask(grid, known, X, Y)
    if mask.any():
        raise ExcludedNodeError(f"node {_first_bad(mask, X, Y)} is excluded from the domain")
    F = _field_stack(atoms, known, X, Y, base)
    if not np.all(np.isfinite(F)):
        raise ExcludedNodeError(f"known solution is not finite at {_first_bad(~np.isfinite(F).all(0), X, Y)}")
    fields = kern.prepare_fields(F)
    pP = kern.prepare(compile_expr(P, sys.unknown, atoms))
    pQ = kern.prepare(compile_expr(Q, sys.unknown, atoms))
    nx, ny = grid.nx, grid.ny
    xs, ys = grid.axes()

    def check(bads, lines, axis, what):
        for k, b in enumerate(bads):
            if b >= 0:
                if axis == 0:
                    node = (float(xs[b]), float(ys[lines[k]]))
                else:
                    node = (float(xs[lines[k]]), float(ys[b]))
                raise TransportOverflowError(f"{what} transport overflowed at node {node}")

    # x then y
    (edge,), bads = _sweep_lines(kern, pP, fields, 0, [w0], nx - 1, grid.hx, [0], 1)
    check(bads, [0], 0, "x-edge")
    cols, bads = _sweep_lines(kern, pQ, fields, 1, edge, ny - 1, grid.hy, list(range(nx)), workers)
    check(bads, list(range(nx)), 1, "column")
    first = np.stack(cols)
    # y then x
    (edge,), bads = _sweep_lines(kern, pQ, fields, 1, [w0], ny - 1, grid.hy, [0], 1)
    check(bads, [0], 1, "y-edge")
    rows, bads = _sweep_lines(kern, pP, fields, 0, edge, nx - 1, grid.hx, list(range(ny)), workers)
    check(bads, list(range(ny)), 0, "row")
    second = np.stack(rows).T
    defect = float(np.max(np.abs(first - second)))
    name = "cython" if kern is backend.compiled and kern is not None else "python"
    return BacklundResult(GridField(grid, first), GridField(grid, second), defect, name)


@dataclass
class LaxResult:
    defect: float
    x_then_y: np.ndarray
    y_then_x: np.ndarray


def _edge_samples(p_entries, atoms, known, xs, ys, base):
    F = _field_stack(atoms, known, xs, ys, base)
    n = len(p_entries)
    M = np.empty((len(xs), n, n))
    for r in range(n):
        for c in range(n):
            prog = p_entries[r][c]
            with np.errstate(all="ignore"):
                M[:, r, c] = evaluate_array(prog, F) if prog is not None else 0.0
    return M


def integrate_lax(p: LaxPair, solution: KnownSolution | None, loop: tuple, steps: int = 1000,
                  kernels=None) -> LaxResult:
    """Transport the identity along x-then-y and y-then-x to the far corner of ``loop``."""
    kern = kernels or backend.kernels
    x0, y0, x1, y1 = map(float, loop)
    base = p.chart.base
    n = p.size
    atoms = sorted(set().union(*(e.atoms() for row in p.A + p.B for e in row)))

    def progs(m):
        return [[compile_expr(e, None, atoms) if e else None for e in row] for row in m]

    pa, pb = progs(p.A), progs(p.B)
    m = 2 * steps
    t = np.array([k / m for k in range(m + 1)])
    xs = x0 + (x1 - x0) * t
    ys = y0 + (y1 - y0) * t
    xs[-1], ys[-1] = x1, y1
    const = np.ones(m + 1)
    for pts in ((xs, y0 * const), (x1 * const, ys), (x0 * const, ys), (xs, y1 * const)):
        mask = solution.excluded(*pts) if solution is not None else np.zeros(m + 1, bool)
        if mask.any():
            k = int(np.argmax(mask))
            raise ExcludedNodeError(f"loop point {(float(pts[0][k]), float(pts[1][k]))} is excluded")
    bottom = _edge_samples(pa, atoms, solution, xs, y0 * const, base)
    right = _edge_samples(pb, atoms, solution, x1 * const, ys, base)
    left = _edge_samples(pb, atoms, solution, x0 * const, ys, base)
    top = _edge_samples(pa, atoms, solution, xs, y1 * const, base)
    for M in (bottom, right, left, top):
        if not np.all(np.isfinite(M)):
            raise TransportOverflowError("Lax matrix is not finite on the loop")
    hx, hy = (x1 - x0) / steps, (y1 - y0) / steps
    eye = np.eye(n)

    def go(first, h1, second, h2):
        X, bad = kern.linear_transport(first, eye, h1)
        if bad >= 0:
            raise TransportOverflowError(f"Lax transport overflowed at step {bad}")
        X, bad = kern.linear_transport(second, X, h2)
        if bad >= 0:
            raise TransportOverflowError(f"Lax transport overflowed at step {bad}")
        return np.asarray(X)

    a = go(bottom, hx, right, hy)
    b = go(left, hy, top, hx)
    return LaxResult(float(np.max(np.abs(a - b))), a, b)
