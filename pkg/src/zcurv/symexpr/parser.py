"""Recursive-descent parser for the expression grammar.

::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('+' | '-') unary | power
    power   := primary ('^' ['-'] INTEGER)?
    primary := NUMBER | 'sqrt2' | IDENT | 'exp' '(' expr ')' | '(' expr ')'

Division is only accepted when the divisor normalizes to a single term.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ExprSyntaxError, NonIntegerExponentError, NonMonomialDivisorError
from .coefficient import SQRT2
from .expr import Expr

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")

RESERVED = frozenset({"exp", "sqrt2"})


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", text, start)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            out.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            out.append(("id", m.group(2), start))
        else:
            if m.group(3) == "**":
                raise ExprSyntaxError("use '^' for powers", text, start)
            out.append(("op", m.group(3), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ExprSyntaxError(message, self.text, tok[2])

    def expect(self, value):
        tok = self.take()
        if tok[0] != "op" or tok[1] != value:
            self.fail(f"expected {value!r}", tok)
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                rhs = self.term()
                e = e + rhs if tok[1] == "+" else e - rhs
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "*/":
                self.take()
                rhs = self.unary()
                if tok[1] == "*":
                    e = e * rhs
                else:
                    if rhs.is_zero():
                        raise ExprSyntaxError("division by zero", self.text, tok[2])
                    if not rhs.is_single_term():
                        raise NonMonomialDivisorError(
                            f"divisor {rhs} at position {tok[2]} is not a single term")
                    e = e * rhs.inverse()
            else:
                return e

    def unary(self) -> Expr:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            e = self.unary()
            return -e if tok[1] == "-" else e
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        tok = self.peek()
        if not (tok[0] == "op" and tok[1] == "^"):
            return base
        self.take()
        sign = 1
        nxt = self.peek()
        if nxt[0] == "op" and nxt[1] == "-":
            self.take()
            sign = -1
            nxt = self.peek()
        if nxt[0] != "num" or "." in nxt[1]:
            raise NonIntegerExponentError(
                f"exponent at position {nxt[2]} must be an integer literal: {self.text!r}")
        self.take()
        n = sign * int(nxt[1])
        if n < 0 and not base.is_single_term():
            raise NonMonomialDivisorError(f"negative power of multi-term expression {base}")
        return base ** n

    def primary(self) -> Expr:
        tok = self.take()
        kind, value, _ = tok
        if kind == "num":
            return Expr.const(Fraction(value))
        if kind == "id":
            if value == "sqrt2":
                return Expr.const(SQRT2)
            if value == "exp":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Expr.exp(arg)
            return Expr.atom(value)
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expected a number, identifier or '('", tok)


def parse(text: str) -> Expr:
    """Parse ``text`` into its canonical :class:`Expr`."""
    if not isinstance(text, str):
        raise TypeError("parse expects a string")
    return _Parser(text).parse()
