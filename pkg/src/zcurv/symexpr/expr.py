"""Canonical sums of exponential-monomial terms over Q(sqrt2).

Each term is ``c * prod(atom_i ** p_i) * exp(sum(q_j * atom_j))`` with
``c`` a :class:`Coefficient`, integer powers ``p_i != 0`` and rational
``q_j != 0``. Terms are keyed by ``(monomial, exponent)``; two terms never
share a key and zero coefficients are never stored, so ``is_zero`` is an
exact test.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping

from ..errors import (
    InexactDivisionError,
    NonLinearExponentError,
    NonMonomialDivisorError,
    UnboundAtomError,
    UnknownAtomError,
)
from .coefficient import ONE, Coefficient, format_coefficient

Mono = tuple  # tuple[tuple[str, int], ...] sorted by atom name
Expo = tuple  # tuple[tuple[str, Fraction], ...] sorted by atom name
Key = tuple  # (Mono, Expo)

_UNIT_KEY: Key = ((), ())


def _merge(a: tuple, b: tuple, sign: int = 1) -> tuple:
    if not b:
        return a
    if not a and sign == 1:
        return b
    acc = dict(a)
    for name, p in b:
        q = acc.get(name, 0) + sign * p
        if q:
            acc[name] = q
        else:
            acc.pop(name, None)
    return tuple(sorted(acc.items()))


def _mul_keys(k1: Key, k2: Key) -> Key:
    return (_merge(k1[0], k2[0]), _merge(k1[1], k2[1]))


def _inv_key(k: Key) -> Key:
    return (tuple((n, -p) for n, p in k[0]), tuple((n, -q) for n, q in k[1]))


def term_sort_key(key: Key):
    """Fixed total order used by the printer: higher degree first."""
    mono, expo = key
    return (-sum(p for _, p in mono), mono, expo)


class Expr:
    """Immutable canonical expression. Build with :func:`parse` or the class helpers."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Key, Coefficient] | None = None):
        # callers must pass canonical data: no zero coefficients
        object.__setattr__(self, "_terms", dict(terms) if terms else {})
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Expr is immutable")

    # constructors ---------------------------------------------------------

    @classmethod
    def _raw(cls, terms: dict) -> "Expr":
        e = cls.__new__(cls)
        object.__setattr__(e, "_terms", terms)
        object.__setattr__(e, "_hash", None)
        return e

    @classmethod
    def const(cls, value) -> "Expr":
        c = Coefficient.coerce(value)
        return cls._raw({_UNIT_KEY: c} if c else {})

    @classmethod
    def atom(cls, name: str) -> "Expr":
        return cls._raw({(((name, 1),), ()): ONE})

    @classmethod
    def term(cls, coefficient, mono: Iterable = (), expo: Iterable = ()) -> "Expr":
        c = Coefficient.coerce(coefficient)
        if not c:
            return ZERO_EXPR
        m = tuple(sorted((n, int(p)) for n, p in mono if p))
        x = tuple(sorted((n, Fraction(q)) for n, q in expo if q))
        return cls._raw({(m, x): c})

    @classmethod
    def exp(cls, argument: "Expr") -> "Expr":
        """``exp(argument)`` for a rational linear form without constant part."""
        form = argument.linear_form()
        return cls._raw({((), tuple(sorted(form.items()))): ONE})

    @classmethod
    def coerce(cls, value) -> "Expr":
        if isinstance(value, Expr):
            return value
        return cls.const(value)

    # inspection -----------------------------------------------------------

    @property
    def terms(self) -> Mapping[Key, Coefficient]:
        return self._terms

    def items(self) -> list:
        """Terms as ``(key, coefficient)`` pairs in printing order."""
        return sorted(self._terms.items(), key=lambda kv: term_sort_key(kv[0]))

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator:
        return iter(self.items())

    def is_zero(self) -> bool:
        return not self._terms

    def is_single_term(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and _UNIT_KEY in self._terms)

    def constant_value(self) -> Coefficient:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get(_UNIT_KEY, Coefficient(0))

    def atoms(self) -> frozenset:
        names = set()
        for mono, expo in self._terms:
            names.update(n for n, _ in mono)
            names.update(n for n, _ in expo)
        return frozenset(names)

    def linear_form(self) -> dict:
        """Map atom -> rational coefficient, if this is ``sum(q_i * atom_i)``."""
        form = {}
        for (mono, expo), c in self._terms.items():
            if expo or len(mono) != 1 or mono[0][1] != 1 or not c.is_rational():
                raise NonLinearExponentError(f"exponent {self} is not a rational linear form in atoms")
            form[mono[0][0]] = c.a
        return form

    def degree_in(self, name: str) -> int:
        """Highest power of ``name`` among the monomial parts (exponentials ignored)."""
        best = 0
        for mono, _ in self._terms:
            for n, p in mono:
                if n == name:
                    best = max(best, p)
        return best

    def coefficient_of_power(self, name: str, power: int) -> "Expr":
        """Collect the terms whose monomial has ``name`` to exactly ``power``, with it removed."""
        out = {}
        for (mono, expo), c in self._terms.items():
            p = dict(mono).get(name, 0)
            if p == power:
                rest = tuple((n, q) for n, q in mono if n != name)
                out[(rest, expo)] = c
        return Expr._raw(out)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = Expr.coerce(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            prev = out.get(k)
            if prev is None:
                out[k] = c
            else:
                s = prev + c
                if s:
                    out[k] = s
                else:
                    del out[k]
        return Expr._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Expr._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-Expr.coerce(other))

    def __rsub__(self, other):
        return Expr.coerce(other) + (-self)

    def __mul__(self, other):
        other = Expr.coerce(other)
        if not self._terms or not other._terms:
            return ZERO_EXPR
        out: dict = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = _mul_keys(k1, k2)
                c = c1 * c2
                prev = out.get(k)
                if prev is not None:
                    c = prev + c
                    if not c:
                        del out[k]
                        continue
                out[k] = c
        return Expr._raw(out)

    __rmul__ = __mul__

    def scale(self, c) -> "Expr":
        c = Coefficient.coerce(c)
        if not c:
            return ZERO_EXPR
        return Expr._raw({k: v * c for k, v in self._terms.items()})

    def inverse(self) -> "Expr":
        if len(self._terms) != 1:
            if not self._terms:
                raise ZeroDivisionError("division by zero expression")
            raise NonMonomialDivisorError(f"cannot invert multi-term expression {self}")
        (k, c), = self._terms.items()
        return Expr._raw({_inv_key(k): c.inverse()})

    def __truediv__(self, other):
        return div_exact(self, Expr.coerce(other))

    def __rtruediv__(self, other):
        return div_exact(Expr.coerce(other), self)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return self.inverse() ** (-n)
        if len(self._terms) == 1:
            (k, c), = self._terms.items()
            key = (tuple((a, p * n) for a, p in k[0]), tuple((a, q * n) for a, q in k[1]))
            return Expr._raw({key: c ** n}) if n else ONE_EXPR
        result = ONE_EXPR
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # calculus -------------------------------------------------------------

    def diff(self, name: str) -> "Expr":
        """Partial derivative treating every atom as independent."""
        out: dict = {}

        def add(k, c):
            prev = out.get(k)
            if prev is not None:
                c = prev + c
                if not c:
                    del out[k]
                    return
            out[k] = c

        for (mono, expo), c in self._terms.items():
            for i, (n, p) in enumerate(mono):
                if n == name:
                    if p == 1:
                        m = mono[:i] + mono[i + 1:]
                    else:
                        m = mono[:i] + ((n, p - 1),) + mono[i + 1:]
                    add((m, expo), c * p)
                    break
            for n, q in expo:
                if n == name:
                    add((mono, expo), c * q)
                    break
        return Expr._raw(out)

    def subs(self, rules: Mapping[str, "Expr"]) -> "Expr":
        """Simultaneous substitution of atoms by expressions."""
        if not rules or not (self.atoms() & rules.keys()):
            return self
        total = ZERO_EXPR
        for (mono, expo), c in self._terms.items():
            factor = Expr._raw({(tuple((n, p) for n, p in mono if n not in rules),
                                 tuple((n, q) for n, q in expo if n not in rules)): c})
            for n, p in mono:
                if n in rules:
                    factor = factor * (Expr.coerce(rules[n]) ** p)
            hit = [(n, q) for n, q in expo if n in rules]
            if hit:
                arg = ZERO_EXPR
                for n, q in hit:
                    arg = arg + Expr.coerce(rules[n]).scale(q)
                factor = factor * Expr.exp(arg)
            total = total + factor
        return total

    def evaluate(self, bindings: Mapping[str, float]) -> float:
        total = 0.0
        for (mono, expo), c in self._terms.items():
            try:
                v = float(c)
                for n, p in mono:
                    v *= _ipow(float(bindings[n]), p)
                if expo:
                    v *= math.exp(math.fsum(float(q) * float(bindings[n]) for n, q in expo))
            except KeyError as exc:
                raise UnboundAtomError(f"atom {exc.args[0]!r} is not bound") from None
            total += v
        return total

    def leading(self, rank: Callable | None = None) -> tuple:
        """Leading ``(key, coefficient)``.

        ``rank`` maps a key to a sortable value and the largest wins; ties
        fall back to the printing order.
        """
        if not self._terms:
            raise ValueError("zero expression has no leading term")
        ordered = self.items()
        if rank is None:
            return ordered[0]
        best = max(rank(k) for k, _ in ordered)
        return next(kv for kv in ordered if rank(kv[0]) == best)

    # comparison / printing -----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Expr):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction, Coefficient)):
            return self._terms == Expr.const(other)._terms
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(frozenset(self._terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"Expr({str(self)!r})"

    def __str__(self):
        return format_expr(self)


def _ipow(x: float, p: int) -> float:
    # repeated multiplication so the compiled kernel can reproduce it bit for bit
    if p < 0:
        return 1.0 / _ipow(x, -p)
    r = 1.0
    for _ in range(p):
        r *= x
    return r


ZERO_EXPR = Expr._raw({})
ONE_EXPR = Expr._raw({_UNIT_KEY: ONE})


def div_exact(lhs: Expr, rhs: Expr) -> Expr:
    """Exact quotient ``lhs / rhs``.

    A single-term divisor always divides (monomial powers may go negative).
    For a multi-term divisor the quotient must itself be a single term: it
    is read off the leading terms and then verified by multiplication.
    """
    if rhs.is_zero():
        raise ZeroDivisionError("division by zero expression")
    if rhs.is_single_term():
        return lhs * rhs.inverse()
    if lhs.is_zero():
        return ZERO_EXPR
    (k1, c1) = lhs.items()[0]
    (k2, c2) = rhs.items()[0]
    q = Expr._raw({_mul_keys(k1, _inv_key(k2)): c1 / c2})
    remainder = lhs - q * rhs
    if remainder:
        raise InexactDivisionError(f"{lhs} is not a single-term multiple of {rhs}", remainder)
    return q


def arith(op: str, lhs: Expr, rhs) -> Expr:
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div_exact":
        return div_exact(lhs, Expr.coerce(rhs))
    if op == "pow_int":
        if not isinstance(rhs, int):
            raise TypeError("pow_int needs an integer exponent")
        return lhs ** rhs
    raise ValueError(f"unknown operation {op!r}")


def diff(e: Expr, name: str, known: Iterable[str] | None = None) -> Expr:
    if known is not None and name not in known:
        raise UnknownAtomError(f"atom {name!r} is not declared in the active chart")
    return e.diff(name)


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    return e.evaluate(bindings)


# printing -------------------------------------------------------------------


def _format_linear(expo: Expo) -> str:
    return format_expr(Expr._raw({((( n, 1),), ()): Coefficient(q) for n, q in expo}))


def format_term(key: Key, c: Coefficient) -> str:
    mono, expo = key
    parts = [n if p == 1 else f"{n}^{p}" for n, p in mono]
    if expo:
        parts.append(f"exp({_format_linear(expo)})")
    if not parts:
        return format_coefficient(c)
    body = "*".join(parts)
    if c.is_one():
        return body
    if c == -1:
        return "-" + body
    return f"{format_coefficient(c)}*{body}"


def format_expr(e: Expr) -> str:
    if not e.terms:
        return "0"
    out = []
    for i, (k, c) in enumerate(e.items()):
        s = format_term(k, c)
        if i == 0:
            out.append(s)
        elif s.startswith("-"):
            out.append(" - " + s[1:])
        else:
            out.append(" + " + s)
    return "".join(out)
