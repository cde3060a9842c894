"""Exact numbers in the field Q(sqrt 2)."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

SQRT2_FLOAT = math.sqrt(2.0)


class Coefficient:
    """The number ``a + b*sqrt2`` with rational ``a`` and ``b``.

    Instances are immutable and hashable. ``Fraction`` keeps both parts
    reduced with a positive denominator.
    """

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", a if type(a) is Fraction else Fraction(a))
        object.__setattr__(self, "b", b if type(b) is Fraction else Fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("Coefficient is immutable")

    @classmethod
    def coerce(cls, value) -> "Coefficient":
        if isinstance(value, Coefficient):
            return value
        if isinstance(value, (int, Rational)):
            return cls(Fraction(value))
        raise TypeError(f"cannot convert {value!r} to Coefficient")

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = Coefficient.coerce(other)
        return Coefficient(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = Coefficient.coerce(other)
        return Coefficient(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return Coefficient.coerce(other) - self

    def __neg__(self):
        return Coefficient(-self.a, -self.b)

    def __mul__(self, other):
        other = Coefficient.coerce(other)
        a, b, c, d = self.a, self.b, other.a, other.b
        if not b and not d:
            return Coefficient(a * c)
        return Coefficient(a * c + 2 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "Coefficient":
        # (a + b r)^-1 = (a - b r) / (a^2 - 2 b^2); the norm is nonzero since sqrt2 is irrational
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero coefficient")
        norm = self.a * self.a - 2 * self.b * self.b
        return Coefficient(self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        return self * Coefficient.coerce(other).inverse()

    def __rtruediv__(self, other):
        return Coefficient.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("Coefficient powers must be integers")
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def is_one(self) -> bool:
        return self.a == 1 and not self.b

    def is_rational(self) -> bool:
        return not self.b

    def sign(self) -> int:
        """Sign of the real number represented, computed exactly."""
        a, b = self.a, self.b
        if not b:
            return (a > 0) - (a < 0)
        if not a:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a^2 with 2 b^2
        if a * a > 2 * b * b:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * SQRT2_FLOAT

    def __eq__(self, other):
        if isinstance(other, Coefficient):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Rational)):
            return not self.b and self.a == other
        return NotImplemented

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b))

    def __bool__(self):
        return not self.is_zero()

    def sort_key(self):
        return (self.a, self.b)

    # printing -------------------------------------------------------------

    def __repr__(self):
        return f"Coefficient({self.a}, {self.b})"

    def __str__(self):
        return format_coefficient(self)


def _fmt_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_coefficient(c: Coefficient) -> str:
    """Render in the expression grammar, e.g. ``3/4``, ``-sqrt2``, ``(1 + 1/2*sqrt2)``."""
    if not c.b:
        return _fmt_rational(c.a)
    if c.b == 1:
        irr = "sqrt2"
    elif c.b == -1:
        irr = "-sqrt2"
    else:
        irr = f"{_fmt_rational(c.b)}*sqrt2"
    if not c.a:
        return irr
    if irr.startswith("-"):
        return f"({_fmt_rational(c.a)} - {irr[1:]})"
    return f"({_fmt_rational(c.a)} + {irr})"


ZERO = Coefficient(0)
ONE = Coefficient(1)
SQRT2 = Coefficient(0, 1)
