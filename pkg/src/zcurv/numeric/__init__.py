"""Floating-point witnesses: residual scans and RK4 transport."""

from . import backend
from .grid import Grid, GridField
from .program import Program, compile_expr, evaluate_array
from .solutions import KnownSolution, to_sympy
from .transport import (BacklundResult, LaxResult, ScanResult, integrate_backlund, integrate_lax,
                        residual_scan)

BACKEND = backend.NAME

__all__ = [
    "BACKEND",
    "BacklundResult",
    "Grid",
    "GridField",
    "KnownSolution",
    "LaxResult",
    "Program",
    "ScanResult",
    "compile_expr",
    "evaluate_array",
    "integrate_backlund",
    "integrate_lax",
    "residual_scan",
    "to_sympy",
]
