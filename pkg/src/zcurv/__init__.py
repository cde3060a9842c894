"""Exact verification of zero-curvature representations, Lax pairs and Backlund maps."""

from .connection import (ConnectionSystem, GammaTable, PdeResidual, StructureConstants, XiTable, curvature,
                         extract_pde, jacobi_check, lie_identity_check, zero_curvature_check)
from .errors import ZcurvError
from .exterior import Chart, DifferentialForm, d, format_form, wedge
from .jetchart import JetChart, Section, contact_forms, pullback
from .symexpr import Expr, parse
from .transforms import backlund_cross_check, lax_compatibility, lax_pair, riccati_form

__version__ = "0.1.0"

__all__ = [
    "Chart", "ConnectionSystem", "DifferentialForm", "Expr", "GammaTable", "JetChart", "PdeResidual",
    "Section", "StructureConstants", "XiTable", "ZcurvError", "backlund_cross_check", "contact_forms",
    "curvature", "d", "extract_pde", "format_form", "jacobi_check", "lax_compatibility", "lax_pair",
    "lie_identity_check", "parse", "pullback", "riccati_form", "wedge", "zero_curvature_check",
]
