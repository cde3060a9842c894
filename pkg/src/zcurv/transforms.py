"""Lax pairs, Riccati pseudopotentials, Backlund systems and one-form closure."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .connection import (ConnectionSystem, GammaTable, PdeResidual, StructureConstants, XiTable,
                         factor_against, normalize_residual, rehome)
from .errors import ChartError, EliminationError, FactorError
from .exterior import Chart, DifferentialForm, d, substitute, wedge
from .jetchart import JetChart, Section, pullback
from .report import VerificationReport
from .symexpr import Expr, JetContext, parse
from .symexpr.expr import ZERO_EXPR

# Lax pairs ----------------------------------------------------------------


@dataclass
class LaxPair:
    """``X_x = A X``, ``X_y = B X`` with entries on the section."""

    A: list
    B: list
    chart: JetChart

    @property
    def size(self) -> int:
        return len(self.A)

    def matrices(self):
        return self.A, self.B


def _mat(m, f):
    return [[f(e) for e in row] for row in m]


def _matmul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), ZERO_EXPR) for j in range(n)] for i in range(n)]


def _matsub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def format_matrix(m) -> str:
    return "[" + ", ".join("[" + ", ".join(str(e) for e in row) + "]" for row in m) + "]"


def lax_pair(gamma: GammaTable, size: int = 2) -> LaxPair:
    """``A = -Gamma_{.1}``, ``B = -Gamma_{.2}`` with jet coordinates pulled back."""
    if len(gamma.chart.base) != 2:
        raise ChartError("Lax pairs are built on a two-dimensional base")
    if len(gamma.matrix_index) != len(gamma.entries):
        raise ChartError("every Gamma row needs a matrix position")
    A = _mat(gamma.matrix(0, size), lambda e: -e)
    B = _mat(gamma.matrix(1, size), lambda e: -e)
    return LaxPair(A, B, gamma.chart)


def lax_residual(p: LaxPair) -> list:
    """``D_y A - D_x B + [A, B]``."""
    ctx = p.chart.jet_context
    x, y = p.chart.base
    dA = _mat(p.A, lambda e: ctx.total_derivative(e, y))
    dB = _mat(p.B, lambda e: ctx.total_derivative(e, x))
    comm = _matsub(_matmul(p.A, p.B), _matmul(p.B, p.A))
    return [[a - b + c for a, b, c in zip(ra, rb, rc)] for ra, rb, rc in zip(dA, dB, comm)]


def lax_compatibility(p: LaxPair, target: PdeResidual, task: str = "lax",
                      display: Mapping | None = None) -> VerificationReport:
    """Pass iff every entry of the compatibility residual is a single-term multiple of ``target``.

    ``display`` optionally holds reference matrices ``{"A": ..., "B": ...}``;
    entries that differ from the derived pair are noted without affecting
    the status.
    """
    rep = VerificationReport(task, "lax")
    ctx = p.chart.jet_context
    R = lax_residual(p)
    rep.extracted["A"] = format_matrix(p.A)
    rep.extracted["B"] = format_matrix(p.B)
    rep.extracted["target"] = str(target.F)
    mult = []
    for i, row in enumerate(R):
        mrow = []
        for j, e in enumerate(row):
            try:
                mrow.append(factor_against(e, target.F, ctx))
            except FactorError:
                mrow.append(None)
                rep.residuals[f"[{i + 1},{j + 1}]"] = str(e)
                rep.fail(f"entry [{i + 1},{j + 1}] is not a single-term multiple of the target")
        mult.append(mrow)
    rep.multipliers["matrix"] = "[" + ", ".join(
        "[" + ", ".join("?" if q is None else str(q) for q in row) + "]" for row in mult) + "]"
    if display:
        for key, mat in (("A", p.A), ("B", p.B)):
            if key not in display:
                continue
            ref = [[_section_parse(p.chart, e) for e in row] for row in display[key]]
            for i, row in enumerate(ref):
                for j, e in enumerate(row):
                    if e != mat[i][j]:
                        rep.notes.append(
                            f"derived {key}[{i + 1},{j + 1}] = {mat[i][j]} differs from the reference {e}")
                        rep.metrics[f"display_mismatch_{key}{i + 1}{j + 1}"] = 1
    return rep


def _section_parse(chart: JetChart, v):
    return chart.parse(v) if isinstance(v, str) else Expr.coerce(v)


# Backlund systems ---------------------------------------------------------


@dataclass
class BacklundSystem:
    """``w_x = P``, ``w_y = Q`` for the unknown ``w`` on a joint section chart."""

    unknown: str
    rhs: tuple
    chart: JetChart
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rhs = tuple(_section_parse(self.chart, e) for e in self.rhs)
        ctx = self.chart.jet_context
        if self.unknown not in ctx.fibers:
            raise ChartError(f"unknown {self.unknown!r} is not a fiber of the chart")
        if len(self.rhs) != len(self.chart.base):
            raise ChartError("one right-hand side per base coordinate is required")
        for e in self.rhs:
            for a in e.atoms():
                s = ctx.split(a)
                if s is not None and s[0] == self.unknown and s[1]:
                    raise EliminationError(
                        f"right-hand side mentions {a}, a derivative of the unknown itself")

    def derivative(self, k: int) -> str:
        return self.chart.jet_context.name(self.unknown, (k,))

    def rules(self) -> dict:
        return {self.derivative(k): e for k, e in enumerate(self.rhs)}

    def __str__(self):
        return "; ".join(f"{self.derivative(k)} = {e}" for k, e in enumerate(self.rhs))


def eliminate(e: Expr, rules: Mapping[str, Expr], order=None, limit: int = 16) -> Expr:
    """Substitute the rules one at a time in ``order`` until nothing changes."""
    order = list(order or rules)
    for _ in range(limit):
        before = e
        for name in order:
            if name in e.atoms():
                e = e.subs({name: rules[name]})
        if e == before:
            return e
    raise EliminationError("elimination did not reach a fixpoint")


@dataclass
class CrossResult:
    unknown: str
    A: Expr  # D_y of the x-equation
    B: Expr  # D_x of the y-equation
    difference: Expr
    mean: Expr


def cross_derivatives(sys: BacklundSystem, order=None) -> CrossResult:
    ctx = sys.chart.jet_context
    if len(sys.chart.base) != 2:
        raise ChartError("cross-derivative checks need a two-dimensional base")
    x, y = sys.chart.base
    rules = sys.rules()
    P, Q = sys.rhs
    A = eliminate(ctx.total_derivative(P, y), rules, order)
    B = eliminate(ctx.total_derivative(Q, x), rules, order)
    diff = A - B
    first = set(rules)
    left = first & diff.atoms()
    if left:
        raise EliminationError(f"elimination leaves first derivatives {sorted(left)}")
    mixed = Expr.atom(ctx.name(sys.unknown, (0, 1)))
    mean = mixed - (A + B).scale(Fraction(1, 2))
    return CrossResult(sys.unknown, A, B, diff, mean)


def backlund_cross_check(sys: BacklundSystem, partner: BacklundSystem | None = None,
                         targets: Mapping[str, PdeResidual] | None = None,
                         decompose: bool = True, task: str = "backlund") -> VerificationReport:
    """Cross-differentiate each system and compare with the target equations.

    For the unknown ``w`` with ``w_x = P``, ``w_y = Q`` the report carries
    ``difference[w] = D_y P - D_x Q`` (the integrability condition, which
    should be an equation for the other unknown) and ``sum[w] = w_xy -
    (D_y P + D_x Q)/2`` (which should be an equation for ``w``), both after
    eliminating ``w_x`` and ``w_y``. Both elimination orders are computed
    and must agree.
    """
    rep = VerificationReport(task, "backlund")
    targets = dict(targets or {})
    systems = [sys] + ([partner] if partner is not None else [])
    ctx = sys.chart.jet_context
    for s in systems:
        w = s.unknown
        try:
            r1 = cross_derivatives(s)
            r2 = cross_derivatives(s, order=list(reversed(list(s.rules()))))
        except EliminationError as exc:
            rep.error(str(exc))
            return rep
        if r1.difference != r2.difference or r1.mean != r2.mean:
            rep.residuals[f"order[{w}]"] = str(r1.difference - r2.difference)
            rep.fail(f"elimination order changes the result for {w}")
        others = [k for k in targets if k != w]
        for label, expr, keys in (("difference", r1.difference, others), ("sum", r1.mean, [w])):
            if label == "sum" and not decompose:
                continue
            F, q = normalize_residual(expr, ctx)
            rep.extracted[f"{label}[{w}]"] = str(F)
            matched = [k for k in keys if k in targets]
            if not matched:
                continue
            k = matched[0]
            try:
                q = factor_against(expr, targets[k].F, ctx)
            except FactorError:
                rep.residuals[f"{label}[{w}]"] = str(expr)
                rep.fail(f"{label}[{w}] does not reduce to the {k} equation")
                continue
            if q.is_zero() and not targets[k].F.is_zero():
                rep.residuals[f"{label}[{w}]"] = "0"
                rep.fail(f"{label}[{w}] vanishes identically and carries no equation")
                continue
            rep.multipliers[f"{label}[{w}]"] = str(q)
    return rep


# Pfaff equations ----------------------------------------------------------


@dataclass
class PfaffEquation:
    """``tau = d nu - sum c_A(nu) w^A = 0`` on a chart containing ``nu``."""

    tau: DifferentialForm
    variable: str

    def __post_init__(self):
        if self.tau.coefficient("d" + self.variable) != 1:
            raise ValueError(f"tau must contain d{self.variable} with coefficient 1")

    def __str__(self):
        return f"{self.tau} = 0"


def riccati_slots(neutral: str, lower: str, upper: str, variable: str) -> dict:
    """Coefficients of ``d phi - w21 - phi w + phi^2 w12``.

    Slot names may carry a leading ``-`` to flip the sign of the assigned
    form: ``neutral`` takes coefficient ``phi``, ``lower`` (the ``w^2_1``
    slot) ``1`` and ``upper`` (the ``w^1_2`` slot) ``-phi^2``.
    """
    phi = Expr.atom(variable)
    out = {}
    for slot, coef in ((neutral, phi), (lower, Expr.const(1)), (upper, -(phi * phi))):
        if slot.startswith("-"):
            slot, coef = slot[1:], -coef
        if slot in out:
            raise ValueError(f"form {slot!r} assigned to two slots")
        out[slot] = coef
    return out


def riccati_form(sys: ConnectionSystem, pattern: Mapping | XiTable, variable: str | None = None):
    """Assemble ``tau`` and read off the induced first-order system for ``nu``.

    ``pattern`` maps connection form names to their coefficients in
    ``nu``; a single-fiber :class:`XiTable` is accepted as well.
    """
    if isinstance(pattern, XiTable):
        if len(pattern.fibers) != 1:
            raise ValueError("a Pfaff equation has a single pseudopotential")
        variable = pattern.fibers[0]
        pattern = {a: pattern(variable, a) for a in pattern.forms}
    pattern = {k: parse(v) if isinstance(v, str) else Expr.coerce(v) for k, v in pattern.items()}
    if variable is None:
        new = set()
        for v in pattern.values():
            new |= v.atoms() - set(sys.chart.atoms)
        if len(new) != 1:
            raise ValueError("pseudopotential name is required")
        variable = new.pop()
    if len(sys.chart.base) != 2:
        raise ChartError("Riccati systems are read off on a two-dimensional base")
    ext = sys.chart if variable in sys.chart.atoms else sys.chart.extend(variable)
    chart = ext.chart
    forms = sys.on(chart)
    tau = chart.d(variable)
    for name, coef in pattern.items():
        if name not in forms:
            raise KeyError(f"pattern names unknown form {name!r}")
        coef = parse(coef) if isinstance(coef, str) else Expr.coerce(coef)
        tau = tau - forms[name] * coef
    eq = PfaffEquation(tau, variable)
    s = Section.symbolic(ext)
    pulled = pullback(tau, s)
    ctx = ext.jet_context
    rhs = []
    for k, b in enumerate(ext.base):
        dv = Expr.atom(ctx.name(variable, (k,)))
        rhs.append(dv - pulled.coefficient("d" + b))
    bs = BacklundSystem(variable, tuple(rhs), ext,
                        provenance={"pattern": {k: str(v) for k, v in pattern.items()}})
    return eq, bs


pfaff_equation = riccati_form


def maurer_cartan(chart: Chart, constants: StructureConstants, frames=None) -> dict:
    """``d theta^A = 1/2 C^A_BC theta^B ^ theta^C`` for frame forms of ``chart``."""
    frames = tuple(frames or chart.frames)
    if len(frames) != constants.g:
        raise ValueError("one frame per algebra index is required")
    out = {}
    for a, name in enumerate(frames):
        f = chart.zero(2)
        for b in range(constants.g):
            for c in range(b + 1, constants.g):
                coef = (constants(a, b, c) - constants(a, c, b)) / 2
                if coef:
                    f = f + wedge(chart.d(frames[b]), chart.d(frames[c])) * coef
        out[name] = f
    return out


def closure_check(tau: PfaffEquation, structure: Mapping[str, DifferentialForm],
                  mod: Mapping[str, DifferentialForm] | None = None,
                  curvature: Mapping[str, DifferentialForm] | None = None,
                  task: str = "closure") -> VerificationReport:
    """Differentiate ``tau`` and reduce it with the structure equations and ``tau = 0``.

    ``structure`` gives ``d theta`` for each frame form; ``mod`` gives extra
    replacements for basis one-forms (a frame set to zero, for instance).
    ``curvature`` optionally adds curvature 2-forms to ``d theta``; their
    contribution is reported separately and does not decide the status.
    """
    rep = VerificationReport(task, "closure")
    chart = tau.tau.chart
    v = tau.variable
    rules = dict(mod or {})
    for name, f in rules.items():
        if f.degree == 0 and not f:
            rules[name] = chart.zero(1)
    solved = chart.d(v) - tau.tau
    rules[v] = substitute(solved, rules) if rules else solved
    full = {n: substitute(f, rules) if rules else f for n, f in structure.items()}
    missing = [chart.basis[i] for i in range(len(chart.coordinates), chart.dimension)
               if chart.basis[i] not in full and chart.basis[i] not in rules]
    if missing:
        rep.error(f"no structure equation for {missing}")
        return rep
    dt = d(tau.tau, full)
    reduced = substitute(dt, rules)
    left = {chart.basis[i] for k in reduced.terms for i in k} & ({v} | set(rules))
    if left:
        rep.error(f"substitution leaves unresolved differentials {sorted(left)}")
        return rep
    rep.extracted["d tau"] = str(reduced)
    if reduced:
        rep.residuals["d tau"] = str(reduced)
        rep.fail("d tau does not vanish modulo the supplied forms")
    if curvature:
        extra = {n: full[n] + curvature.get(n, chart.zero(2)) for n in full}
        diff = substitute(d(tau.tau, extra), rules) - reduced
        rep.extracted["curvature part"] = str(diff)
    return rep
