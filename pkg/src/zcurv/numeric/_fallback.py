"""Pure-Python RK4 kernels. Mirrors ``_kernels.pyx`` operation for operation."""

from __future__ import annotations

import math

import numpy as np

INF = float("inf")


def _unpack(p):
    return (p.coef.tolist(), p.mono_ptr.tolist(), p.mono_slot.tolist(), p.mono_pow.tolist(),
            p.exp_ptr.tolist(), p.exp_slot.tolist(), p.exp_q.tolist())


def _eval(prog, F, i, j, w):
    coef, mptr, mslot, mpow, eptr, eslot, eq = prog
    total = 0.0
    for t in range(len(coef)):
        v = coef[t]
        for m in range(mptr[t], mptr[t + 1]):
            s = mslot[m]
            x = w if s == 0 else F[s - 1][i][j]
            p = mpow[m]
            y = x
            for _ in range(abs(p) - 1):
                y = y * x
            if p > 0:
                v = v * y
            else:
                v = v / y if y != 0.0 else math.copysign(INF, v) * math.copysign(1.0, y)
        if eptr[t] < eptr[t + 1]:
            arg = 0.0
            for k in range(eptr[t], eptr[t + 1]):
                s = eslot[k]
                x = w if s == 0 else F[s - 1][i][j]
                arg = arg + eq[k] * x
            try:
                v = v * math.exp(arg)
            except OverflowError:
                v = v * INF
        total = total + v
    return total


def sweep(prog, F, axis, fixed, start, n, h, w0, out):
    """RK4 for ``n`` steps along ``axis`` at half-grid line ``fixed``.

    Writes ``n + 1`` values into ``out`` and returns the index of the first
    non-finite value, or -1.
    """
    if not isinstance(prog, tuple):
        prog = _unpack(prog)
    if isinstance(F, np.ndarray):
        F = F.tolist()
    hh = 0.5 * h
    h6 = h / 6.0
    w = w0
    out[0] = w
    if not math.isfinite(w):
        return 0
    for step in range(n):
        a = start + 2 * step
        if axis == 0:
            k1 = _eval(prog, F, a, fixed, w)
            k2 = _eval(prog, F, a + 1, fixed, w + hh * k1)
            k3 = _eval(prog, F, a + 1, fixed, w + hh * k2)
            k4 = _eval(prog, F, a + 2, fixed, w + h * k3)
        else:
            k1 = _eval(prog, F, fixed, a, w)
            k2 = _eval(prog, F, fixed, a + 1, w + hh * k1)
            k3 = _eval(prog, F, fixed, a + 1, w + hh * k2)
            k4 = _eval(prog, F, fixed, a + 2, w + h * k3)
        w = w + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[step + 1] = w
        if not math.isfinite(w):
            return step + 1
    return -1


def _matvec_into(M, X, n, out):
    for r in range(n):
        for c in range(n):
            acc = 0.0
            for k in range(n):
                acc = acc + M[r][k] * X[k][c]
            out[r][c] = acc


def linear_transport(M, X0, h):
    """RK4 for ``X' = M(s) X`` with ``M`` sampled at nodes and midpoints.

    Returns ``(X, bad_step)`` with ``bad_step = -1`` when all values stay finite.
    """
    Ms = M.tolist() if isinstance(M, np.ndarray) else M
    X = [list(map(float, row)) for row in (X0.tolist() if isinstance(X0, np.ndarray) else X0)]
    n = len(X)
    steps = (len(Ms) - 1) // 2
    hh = 0.5 * h
    h6 = h / 6.0
    k1 = [[0.0] * n for _ in range(n)]
    k2 = [[0.0] * n for _ in range(n)]
    k3 = [[0.0] * n for _ in range(n)]
    k4 = [[0.0] * n for _ in range(n)]
    tmp = [[0.0] * n for _ in range(n)]
    for step in range(steps):
        a = 2 * step
        _matvec_into(Ms[a], X, n, k1)
        for r in range(n):
            for c in range(n):
                tmp[r][c] = X[r][c] + hh * k1[r][c]
        _matvec_into(Ms[a + 1], tmp, n, k2)
        for r in range(n):
            for c in range(n):
                tmp[r][c] = X[r][c] + hh * k2[r][c]
        _matvec_into(Ms[a + 1], tmp, n, k3)
        for r in range(n):
            for c in range(n):
                tmp[r][c] = X[r][c] + h * k3[r][c]
        _matvec_into(Ms[a + 2], tmp, n, k4)
        bad = False
        for r in range(n):
            for c in range(n):
                X[r][c] = X[r][c] + h6 * (k1[r][c] + 2.0 * k2[r][c] + 2.0 * k3[r][c] + k4[r][c])
                if not math.isfinite(X[r][c]):
                    bad = True
        if bad:
            return np.array(X), step + 1
    return np.array(X), -1


def prepare(prog):
    return _unpack(prog)


def prepare_fields(F):
    return np.ascontiguousarray(F, dtype=np.float64).tolist()
