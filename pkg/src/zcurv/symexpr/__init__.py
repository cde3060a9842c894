"""Exact symbolic expressions over Q(sqrt2) with linear exponentials."""

from .coefficient import ONE, SQRT2, ZERO, Coefficient
from .expr import ONE_EXPR, ZERO_EXPR, Expr, arith, diff, div_exact, evaluate, format_expr
from .jet import JetContext, total_derivative
from .parser import parse

__all__ = [
    "Coefficient",
    "Expr",
    "JetContext",
    "ONE",
    "ONE_EXPR",
    "SQRT2",
    "ZERO",
    "ZERO_EXPR",
    "arith",
    "diff",
    "div_exact",
    "evaluate",
    "format_expr",
    "parse",
    "total_derivative",
]
