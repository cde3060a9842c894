"""Flat term programs: an Expr lowered to arrays the kernels can evaluate.

Slot 0 is the transported state; slot ``k >= 1`` is row ``k - 1`` of the
field stack. Powers are applied by repeated multiplication in both
backends so that they agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UnboundAtomError
from ..symexpr import Expr


@dataclass(frozen=True)
class Program:
    coef: np.ndarray       # float64[T]
    mono_ptr: np.ndarray   # int32[T + 1]
    mono_slot: np.ndarray  # int32[M]
    mono_pow: np.ndarray   # int32[M]
    exp_ptr: np.ndarray    # int32[T + 1]
    exp_slot: np.ndarray   # int32[E]
    exp_q: np.ndarray      # float64[E]

    @property
    def n_terms(self) -> int:
        return len(self.coef)


def compile_expr(e: Expr, state: str | None, fields: list) -> Program:
    """Lower ``e``; ``state`` names slot 0 and ``fields[k]`` names slot ``k + 1``."""
    slots = {name: k + 1 for k, name in enumerate(fields)}
    if state is not None:
        slots[state] = 0
    missing = e.atoms() - set(slots)
    if missing:
        raise UnboundAtomError(f"no numeric values for atoms {sorted(missing)}")
    coef, mptr, mslot, mpow, eptr, eslot, eq = [], [0], [], [], [0], [], []
    for (mono, expo), c in e.items():
        coef.append(float(c))
        for name, p in mono:
            mslot.append(slots[name])
            mpow.append(p)
        mptr.append(len(mslot))
        for name, q in expo:
            eslot.append(slots[name])
            eq.append(float(q))
        eptr.append(len(eslot))
    i32 = np.int32
    return Program(np.array(coef, dtype=np.float64), np.array(mptr, dtype=i32),
                   np.array(mslot, dtype=i32), np.array(mpow, dtype=i32),
                   np.array(eptr, dtype=i32), np.array(eslot, dtype=i32),
                   np.array(eq, dtype=np.float64))


def evaluate_array(p: Program, fields: np.ndarray, state=None) -> np.ndarray:
    """Vectorized evaluation over the trailing axes of ``fields``."""
    shape = fields.shape[1:]
    total = np.zeros(shape)
    for t in range(p.n_terms):
        v = np.full(shape, p.coef[t])
        for m in range(p.mono_ptr[t], p.mono_ptr[t + 1]):
            s = p.mono_slot[m]
            x = state if s == 0 else fields[s - 1]
            v = v * np.power(x, float(p.mono_pow[m]))
        if p.exp_ptr[t] < p.exp_ptr[t + 1]:
            arg = np.zeros(shape)
            for k in range(p.exp_ptr[t], p.exp_ptr[t + 1]):
                s = p.exp_slot[k]
                x = state if s == 0 else fields[s - 1]
                arg = arg + p.exp_q[k] * x
            v = v * np.exp(arg)
        total = total + v
    return total
