"""Closed-form known solutions, differentiated symbolically with sympy."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from ..errors import ProblemFileError, UnboundAtomError
from ..symexpr import Expr, JetContext

_TRANSFORMS = standard_transformations + (convert_xor,)


def to_sympy(text, symbols: dict):
    """Parse a closed form; accepts the expression grammar plus ``log``/``ln``."""
    if isinstance(text, Expr):
        text = str(text)
    local = dict(symbols)
    local.update({"sqrt2": sympy.sqrt(2), "ln": sympy.log, "log": sympy.log, "exp": sympy.exp,
                  "sqrt": sympy.sqrt})
    try:
        return parse_expr(str(text), local_dict=local, transformations=_TRANSFORMS)
    except Exception as exc:  # sympy raises a zoo of exception types
        raise ProblemFileError(f"cannot parse closed form {text!r}: {exc}") from None


class KnownSolution:
    """Fibers bound to closed forms in the base coordinates.

    ``require`` is an optional expression that must stay positive on the
    domain; nodes where it is not (or where any needed value is not finite)
    are excluded.
    """

    def __init__(self, base, fields: dict, require: str | None = None):
        self.base = tuple(base)
        self.symbols = {b: sympy.Symbol(b, real=True) for b in self.base}
        self.fields = {k: to_sympy(v, self.symbols) for k, v in fields.items()}
        for k, e in self.fields.items():
            stray = {str(s) for s in e.free_symbols} - set(self.base)
            if stray:
                raise ProblemFileError(f"closed form for {k!r} mentions non-base symbols {sorted(stray)}")
        self.require = to_sympy(require, self.symbols) if require else None
        self.ctx = JetContext(self.base, tuple(self.fields), max_order=8)
        self._cache = {}

    def _lambda(self, e):
        args = [self.symbols[b] for b in self.base]
        return sympy.lambdify(args, e, modules="numpy")

    def derivative(self, fiber: str, idx: tuple):
        e = self.fields[fiber]
        for i in idx:
            e = sympy.diff(e, self.symbols[self.base[i]])
        return e

    def values(self, atom: str, *coords) -> np.ndarray:
        """Numeric values of a base coordinate, fiber or derivative atom."""
        shape = np.broadcast(*coords).shape
        if atom in self.base:
            return np.broadcast_to(np.asarray(coords[self.base.index(atom)], dtype=float), shape).copy()
        fn = self._cache.get(atom)
        if fn is None:
            s = self.ctx.split(atom)
            if s is None:
                raise UnboundAtomError(f"atom {atom!r} is not bound by the known solution")
            fn = self._lambda(self.derivative(*s))
            self._cache[atom] = fn
        with np.errstate(all="ignore"):
            out = np.asarray(fn(*coords), dtype=float)
        return np.broadcast_to(out, shape).copy()

    def excluded(self, *coords) -> np.ndarray:
        shape = np.broadcast(*coords).shape
        if self.require is None:
            return np.zeros(shape, dtype=bool)
        fn = self._cache.get("__require__")
        if fn is None:
            fn = self._cache["__require__"] = self._lambda(self.require)
        with np.errstate(all="ignore"):
            r = np.broadcast_to(np.asarray(fn(*coords), dtype=float), shape)
        return ~(np.isfinite(r) & (r > 0))

    def value_at(self, fiber: str, *point) -> float:
        return float(self.values(fiber, *[np.float64(p) for p in point]))
