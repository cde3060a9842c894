"""Derivative atoms and the total derivative on a section.

A derivative atom is spelled ``<fiber>_<letters>`` where the letters are
single-character base coordinate names, e.g. ``u_xy``. The letters are
kept sorted by base declaration order, so ``u_yx`` is the same atom as
``u_xy`` once canonicalized.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ChartError, JetOrderError
from .expr import ZERO_EXPR, Expr


@dataclass(frozen=True)
class JetContext:
    base: tuple
    fibers: tuple
    max_order: int = 3

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "fibers", tuple(self.fibers))
        for b in self.base:
            if len(b) != 1:
                raise ChartError(f"base coordinate {b!r} must be a single character")
        clash = set(self.base) & set(self.fibers)
        if clash:
            raise ChartError(f"names used as both base and fiber: {sorted(clash)}")

    def split(self, name: str):
        """``(fiber, multi_index)`` for a derivative atom, else ``None``."""
        if name in self.fibers:
            return name, ()
        fiber, sep, letters = name.rpartition("_")
        if not sep or fiber not in self.fibers or not letters:
            return None
        try:
            idx = tuple(sorted(self.base.index(ch) for ch in letters))
        except ValueError:
            return None
        return fiber, idx

    def name(self, fiber: str, multi_index) -> str:
        idx = sorted(multi_index)
        if not idx:
            return fiber
        return fiber + "_" + "".join(self.base[i] for i in idx)

    def is_derivative(self, name: str) -> bool:
        return self.split(name) is not None

    def order(self, name: str) -> int:
        s = self.split(name)
        return -1 if s is None else len(s[1])

    def promote(self, name: str, base: str) -> str:
        fiber, idx = self.split(name)
        if len(idx) + 1 > self.max_order:
            raise JetOrderError(
                f"D_{base} {name} exceeds the maximum jet order {self.max_order}")
        return self.name(fiber, idx + (self.base.index(base),))

    def canonicalize(self, e: Expr) -> Expr:
        rules = {}
        for a in e.atoms():
            s = self.split(a)
            if s is not None:
                canon = self.name(*s)
                if canon != a:
                    rules[a] = Expr.atom(canon)
        return e.subs(rules) if rules else e

    def total_derivative(self, e: Expr, base: str) -> Expr:
        return total_derivative(e, base, self)


def total_derivative(e: Expr, base: str, ctx: JetContext) -> Expr:
    """``D_base e = d e/d base + sum over derivative atoms a of (D_base a) * d e/d a``."""
    if base not in ctx.base:
        raise ChartError(f"{base!r} is not a base coordinate of {ctx.base}")
    result = ZERO_EXPR
    for a in sorted(e.atoms()):
        if a == base:
            result = result + e.diff(a)
        elif ctx.is_derivative(a):
            result = result + Expr.atom(ctx.promote(a, base)) * e.diff(a)
    return result
