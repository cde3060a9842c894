"""Connection systems over jet charts and their curvature."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping

from .errors import ChartError, DegreeError, FactorError
from .exterior import Chart, DifferentialForm, d, substitute, wedge
from .jetchart import JetChart, Section, pullback
from .report import VerificationReport
from .symexpr import Expr, JetContext, parse
from .symexpr.expr import ONE_EXPR, ZERO_EXPR


# structure constants ------------------------------------------------------

class StructureConstants:
    """Table ``C^A_BC`` with 0-based indices internally.

    ``from_entries`` takes 1-based ``(A, B, C) -> value`` entries and fills in
    the antisymmetric partners; a partner given with the wrong sign is an
    error. The raw constructor keeps the table as given so that
    antisymmetry violations can be reported rather than repaired.
    """

    def __init__(self, g: int, table: Mapping | None = None, names: tuple | None = None):
        self.g = int(g)
        self.names = tuple(names) if names else tuple(str(i + 1) for i in range(self.g))
        if len(self.names) != self.g:
            raise ValueError("one name per algebra index is required")
        self._table = {}
        for (a, b, c), v in (table or {}).items():
            if not all(0 <= i < self.g for i in (a, b, c)):
                raise IndexError(f"index ({a}, {b}, {c}) out of range for g = {self.g}")
            v = Fraction(v)
            if v:
                self._table[(a, b, c)] = v

    @classmethod
    def from_entries(cls, g: int, entries: Mapping, names: tuple | None = None) -> "StructureConstants":
        table = {}
        for (a, b, c), v in entries.items():
            a, b, c = a - 1, b - 1, c - 1
            v = Fraction(v)
            if b == c:
                if v:
                    raise ValueError(f"C^{a + 1}_{b + 1}{c + 1} must vanish")
                continue
            for key, val in (((a, b, c), v), ((a, c, b), -v)):
                if key in table and table[key] != val:
                    raise ValueError(
                        f"conflicting entries for C^{key[0] + 1}_{key[1] + 1}{key[2] + 1}")
                table[key] = val
        return cls(g, table, names)

    @classmethod
    def zero(cls, g: int) -> "StructureConstants":
        return cls(g, {})

    def __call__(self, a: int, b: int, c: int) -> Fraction:
        return self._table.get((a, b, c), Fraction(0))

    def items(self):
        return sorted(self._table.items())

    def antisymmetry_violations(self) -> list:
        out = []
        for a, b, c in product(range(self.g), repeat=3):
            if b <= c and self(a, b, c) != -self(a, c, b):
                out.append((a, b, c))
        return out

    def jacobi_sum(self, k: int, l: int, m: int, e: int) -> Fraction:
        """Component ``e`` of ``[[x_k, x_l], x_m] + cyclic``."""
        total = Fraction(0)
        for (p, q, r) in ((k, l, m), (l, m, k), (m, k, l)):
            for a in range(self.g):
                ca = self(a, p, q)
                if ca:
                    total += ca * self(e, a, r)
        return total

    def __eq__(self, other):
        return isinstance(other, StructureConstants) and self.g == other.g and self._table == other._table

    def __repr__(self):
        return f"StructureConstants(g={self.g}, {len(self._table)} nonzero)"


def jacobi_check(c: StructureConstants, task: str = "jacobi") -> VerificationReport:
    rep = VerificationReport(task, "jacobi")
    asym = c.antisymmetry_violations()
    for a, b, cc in asym:
        n = c.names
        rep.residuals[f"antisymmetry C^{n[a]}_{n[b]}{n[cc]}"] = str(c(a, b, cc) + c(a, cc, b))
    bad = 0
    for k in range(c.g):
        for l in range(k + 1, c.g):
            for m in range(l + 1, c.g):
                for e in range(c.g):
                    s = c.jacobi_sum(k, l, m, e)
                    if s:
                        bad += 1
                        n = c.names
                        rep.residuals[f"jacobi ({n[k]},{n[l]},{n[m]}) component {n[e]}"] = str(s)
    rep.metrics["antisymmetry_violations"] = len(asym)
    rep.metrics["jacobi_violations"] = bad
    if asym or bad:
        rep.fail()
    return rep


# connection systems -------------------------------------------------------

@dataclass
class GammaTable:
    """Coefficients ``Gamma^A_k`` of ``w^A = sum_k Gamma^A_k dx^k`` in the contact gauge.

    ``entries`` maps a form name to one Expr per base coordinate.
    ``matrix_index`` maps a form name to its ``(i, j)`` position (1-based)
    when the algebra is a matrix algebra.
    """

    chart: JetChart
    entries: dict
    matrix_index: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.chart.base)
        clean = {}
        for name, row in self.entries.items():
            row = tuple(parse(e) if isinstance(e, str) else Expr.coerce(e) for e in row)
            if len(row) != n:
                raise ChartError(f"Gamma row {name!r} needs {n} entries, got {len(row)}")
            clean[name] = row
        self.entries = clean
        if not self.matrix_index:
            for name in clean:
                digits = name[-2:]
                if len(digits) == 2 and digits.isdigit():
                    self.matrix_index[name] = (int(digits[0]), int(digits[1]))

    @classmethod
    def read_off(cls, sys: "ConnectionSystem") -> "GammaTable":
        """Read ``Gamma`` from forms that only involve base differentials."""
        c = sys.chart.chart
        base = sys.chart.base
        entries = {}
        for name, form in sys.items():
            extra = set(form.basis_used()) - set(base)
            if extra:
                raise ChartError(f"form {name!r} has non-horizontal parts {sorted(extra)}")
            entries[name] = tuple(form.coefficient("d" + b) for b in base)
        return cls(sys.chart, entries)

    def form(self, name: str) -> DifferentialForm:
        c = self.chart.chart
        out = c.zero(1)
        for b, g in zip(self.chart.base, self.entries[name]):
            out = out + c.d(b) * g
        return out

    def on_section(self) -> dict:
        s = Section.symbolic(self.chart)
        return {name: tuple(s.apply(e) for e in row) for name, row in self.entries.items()}

    def matrix(self, k: int, size: int = 2, section: bool = True) -> list:
        """``M[i][j] = Gamma^{(i,j)}_k``, 0-based ``k``."""
        rows = self.on_section() if section else self.entries
        m = [[ZERO_EXPR] * size for _ in range(size)]
        for name, (i, j) in self.matrix_index.items():
            if not (1 <= i <= size and 1 <= j <= size):
                raise ChartError(f"matrix index {(i, j)} of {name!r} exceeds {size}x{size}")
            m[i - 1][j - 1] = rows[name][k] if name in rows else ZERO_EXPR
        return m


class ConnectionSystem:
    """Structure constants plus named connection one-forms on a jet chart."""

    def __init__(self, chart: JetChart, constants: StructureConstants,
                 forms: Mapping[str, DifferentialForm], gamma: GammaTable | None = None):
        self.chart = chart
        self.constants = constants
        c = chart.chart
        self.forms = {}
        for name, f in forms.items():
            if isinstance(f, Mapping):
                f = DifferentialForm.from_mapping(c, {k: _jet_parse(chart, v) for k, v in f.items()})
            if not f:
                f = c.zero(1)
            if f.degree != 1:
                raise DegreeError(f"connection form {name!r} must have degree 1")
            if f.chart != c:
                f = rehome(f, c)
            self.forms[name] = f
        if len(self.forms) != constants.g:
            raise ValueError(f"{len(self.forms)} forms for an algebra of dimension {constants.g}")
        if set(self.forms) == set(constants.names):
            self.forms = {n: self.forms[n] for n in constants.names}
        self.gamma = gamma
        if gamma is not None:
            bad = self.reconstruction_defects()
            if bad:
                raise ValueError(f"Gamma table does not reconstruct forms {bad}")

    @property
    def names(self) -> tuple:
        return tuple(self.forms)

    def items(self):
        return self.forms.items()

    def __getitem__(self, name):
        return self.forms[name]

    def reconstruction_defects(self) -> list:
        bad = []
        for name, f in self.forms.items():
            if name in self.gamma.entries:
                if self.gamma.form(name) != f:
                    bad.append(name)
            elif f:
                bad.append(name)
        return bad

    def on(self, chart: Chart) -> dict:
        return {n: rehome(f, chart) for n, f in self.forms.items()}


def _jet_parse(chart: JetChart, v):
    return chart.parse(v) if isinstance(v, str) else v


def rehome(f: DifferentialForm, chart: Chart) -> DifferentialForm:
    """The same form on a chart whose basis contains the source basis."""
    terms = {}
    for idx, c in f.terms.items():
        new = tuple(chart.index(f.chart.basis[i]) for i in idx)
        if list(new) != sorted(new):
            raise ChartError("target chart reorders the basis")
        terms[new] = c
    return DifferentialForm(chart, f.degree, terms)


def curvature(sys: ConnectionSystem, chart: Chart | None = None) -> list:
    """``Omega^A = d w^A - 1/2 C^A_BC w^B ^ w^C`` for each form, in declaration order."""
    forms = list(sys.on(chart).values()) if chart is not None else list(sys.forms.values())
    c = sys.constants
    g = c.g
    wedges = {}
    for b in range(g):
        for cc in range(b + 1, g):
            wedges[(b, cc)] = wedge(forms[b], forms[cc])
    out = []
    for a in range(g):
        omega = d(forms[a])
        for (b, cc), w in wedges.items():
            # the pair (b, c) and (c, b) together contribute C^a_bc w^b ^ w^c
            coef = (c(a, b, cc) - c(a, cc, b)) / 2
            if coef and w:
                omega = omega - w * coef
        out.append(omega)
    return out


@dataclass
class CurvatureTensor:
    """``R^A_{ed}`` on the section, indexed ``(A, e, d)`` with 0-based indices."""

    names: tuple
    base: tuple
    components: dict

    def __call__(self, a, e, dd) -> Expr:
        return self.components.get((a, e, dd), ZERO_EXPR)

    def is_antisymmetric(self) -> bool:
        n = len(self.base)
        return all(self(a, e, dd) == -self(a, dd, e)
                   for a in range(len(self.names)) for e in range(n) for dd in range(n))


def curvature_components(gamma: GammaTable, c: StructureConstants, chart: JetChart | None = None,
                         names: tuple | None = None) -> CurvatureTensor:
    """``R^A_{ed} = -1/2 (D_d G^A_e - D_e G^A_d + C^A_BC G^B_e G^C_d)`` on the section."""
    chart = chart or gamma.chart
    names = tuple(names) if names else tuple(gamma.entries)
    if len(names) != c.g:
        raise ValueError("one Gamma row per algebra index is required")
    ctx = chart.jet_context
    rows = gamma.on_section()
    n = len(chart.base)
    G = [rows.get(name, (ZERO_EXPR,) * n) for name in names]
    comps = {}
    for a in range(c.g):
        for e in range(n):
            for dd in range(n):
                if e == dd:
                    continue
                r = ctx.total_derivative(G[a][e], chart.base[dd]) - ctx.total_derivative(G[a][dd], chart.base[e])
                for b in range(c.g):
                    for cc in range(c.g):
                        k = c(a, b, cc)
                        if k:
                            r = r + (G[b][e] * G[cc][dd]).scale(k)
                r = r.scale(Fraction(-1, 2))
                if r:
                    comps[(a, e, dd)] = r
    return CurvatureTensor(names, chart.base, comps)


# PDE extraction -----------------------------------------------------------

@dataclass(frozen=True)
class PdeResidual:
    """The equation ``F = 0``."""

    name: str
    F: Expr

    def __str__(self):
        return f"{self.F}"


def derivative_rank(ctx: JetContext) -> Callable:
    """Ranking of terms used to pick leading terms of PDE residuals.

    Derivative atoms outrank everything else; between two derivatives the
    counts of derivatives in the base coordinates are compared from the
    last coordinate to the first, so ``u_xt`` outranks ``u_xxx``. A term is
    ranked by the descending list of its atom ranks, repeated by power.
    """
    n = len(ctx.base)

    def atom_rank(name: str):
        s = ctx.split(name)
        if s is None:
            return (0, (0,) * n, 0, name)
        fiber, idx = s
        counts = tuple(idx.count(i) for i in reversed(range(n)))
        return (1, counts, -ctx.fibers.index(fiber), name)

    def rank(key):
        mono, _ = key
        ranks = []
        for name, p in mono:
            if p > 0:
                ranks.extend([atom_rank(name)] * p)
        return tuple(sorted(ranks, reverse=True))

    return rank


def _gcd_monomial(e: Expr, ctx: JetContext) -> Expr:
    """Common monomial factor over atoms that are not derivatives."""
    keys = list(e.terms)
    names = set()
    for mono, _ in keys:
        names.update(n for n, _ in mono if ctx.order(n) < 1)
    mono = []
    for name in sorted(names):
        low = min(dict(m).get(name, 0) for m, _ in keys)
        if low:
            mono.append((name, low))
    return Expr.term(1, mono)


def normalize_residual(r: Expr, ctx: JetContext):
    """Split ``r = q * F`` with ``q`` a single term and ``F`` of leading coefficient 1."""
    if r.is_zero():
        return ZERO_EXPR, ONE_EXPR
    rank = derivative_rank(ctx)
    (mono, expo), coef = r.leading(rank)
    q = Expr.term(coef, (), expo) * _gcd_monomial(r, ctx)
    F = r / q
    (_, c2) = F.leading(rank)
    if not c2.is_one():
        F = F.scale(c2.inverse())
        q = q.scale(c2)
    return F, q


def factor_against(r: Expr, target: Expr, ctx: JetContext) -> Expr:
    """Single-term ``q`` with ``r == q * target`` exactly, else :class:`FactorError`."""
    if r.is_zero():
        return ZERO_EXPR
    if target.is_zero():
        raise FactorError("cannot factor a nonzero residual against the zero target")
    rank = derivative_rank(ctx)
    lt_key, lt_coef = target.leading(rank)
    lt = Expr._raw({lt_key: lt_coef})
    for key, coef in r.items():
        q = Expr._raw({key: coef}) / lt
        if q * target == r:
            return q
    raise FactorError(f"{r} is not a single-term multiple of {target}")


def top_coefficient(omega: DifferentialForm) -> Expr:
    chart = omega.chart
    if omega.degree != 2:
        raise DegreeError("expected a 2-form")
    if len(chart.coordinates) != 2 or chart.frames:
        raise ChartError("PDE extraction needs a two-dimensional base chart")
    return omega.coefficient(*("d" + b for b in chart.coordinates))


def extract_pde(omega: DifferentialForm, chart: JetChart, target: PdeResidual | Expr | None = None,
                name: str = "F"):
    """Read the ``dx ^ dy`` coefficient ``r`` and split it as ``q * F``.

    Without a target ``F`` is normalized to leading coefficient 1 under
    :func:`derivative_rank`. A zero form gives ``F = 0, q = 1``. With a target
    ``q`` is found by leading-term matching and verified exactly.
    """
    r = top_coefficient(omega)
    ctx = chart.jet_context
    if target is None:
        F, q = normalize_residual(r, ctx)
        return PdeResidual(name, F), q
    t = target.F if isinstance(target, PdeResidual) else target
    q = factor_against(r, t, ctx)
    return (target if isinstance(target, PdeResidual) else PdeResidual(name, t)), q


def solve_leading(F: Expr, ctx: JetContext):
    """``(atom, value)`` solving ``F = 0`` for its highest-ranked derivative atom, or ``None``."""
    rank = derivative_rank(ctx)
    cands = [a for a in F.atoms() if ctx.split(a) is not None and ctx.split(a)[1]]
    if not cands:
        return None
    top = max(cands, key=lambda a: rank(((( a, 1),), ())))
    if F.degree_in(top) != 1:
        return None
    coef = F.coefficient_of_power(top, 1)
    if not coef.is_single_term() or top in coef.atoms():
        return None
    rest = F - coef * Expr.atom(top)
    if top in rest.atoms():
        return None
    return top, -(rest / coef)


def reduce_modulo(e: Expr, F: Expr, ctx: JetContext) -> Expr:
    """Substitute the solved form of ``F = 0`` into ``e``."""
    sol = solve_leading(F, ctx)
    if sol is None:
        return e
    atom, value = sol
    return e.subs({atom: value})


def zero_curvature_check(sys: ConnectionSystem, target: PdeResidual, task: str = "zero-curvature") -> VerificationReport:
    rep = VerificationReport(task, "zero-curvature")
    if len(sys.chart.base) != 2:
        rep.error("zero-curvature check needs a two-dimensional base")
        return rep
    ctx = sys.chart.jet_context
    s = Section.symbolic(sys.chart)
    rep.extracted["target"] = str(target.F)
    for name, omega in zip(sys.names, curvature(sys)):
        r = top_coefficient(pullback(omega, s))
        try:
            q = factor_against(r, target.F, ctx)
        except FactorError:
            rep.residuals[name] = str(r)
            rep.fail(f"curvature of {name} is not a single-term multiple of the target")
            continue
        rep.multipliers[name] = str(q)
        if not reduce_modulo(r, target.F, ctx).is_zero():
            rep.residuals[name] = str(r)
            rep.fail(f"curvature of {name} survives substitution of the solved equation")
    return rep


# associated bundles -------------------------------------------------------

class XiTable:
    """Coefficients ``xi^I_A(X)`` of ``dX^I - xi^I_A w^A``.

    ``fibers`` are the coordinates ``X^I``; ``forms`` the algebra basis names
    (in structure-constant order); ``entries`` maps ``(X^I, form) -> Expr``.
    """

    def __init__(self, fibers, forms, entries: Mapping):
        self.fibers = tuple(fibers)
        self.forms = tuple(forms)
        self.entries = {}
        for (x, a), v in entries.items():
            if x not in self.fibers or a not in self.forms:
                raise KeyError(f"xi entry ({x!r}, {a!r}) references an undeclared fiber or form")
            v = parse(v) if isinstance(v, str) else Expr.coerce(v)
            if v:
                self.entries[(x, a)] = v

    def __call__(self, x: str, a: str) -> Expr:
        return self.entries.get((x, a), ZERO_EXPR)

    def by_index(self, i: int, a: int) -> Expr:
        return self(self.fibers[i], self.forms[a])

    def atoms(self) -> frozenset:
        out = set()
        for v in self.entries.values():
            out |= v.atoms()
        return frozenset(out)


def lie_identity_residuals(xi: XiTable, c: StructureConstants) -> dict:
    if len(xi.forms) != c.g:
        raise ValueError("xi table and structure constants disagree on the algebra dimension")
    out = {}
    for i, x in enumerate(xi.fibers):
        for b in range(c.g):
            for cc in range(b + 1, c.g):
                r = ZERO_EXPR
                for xk in xi.fibers:
                    r = r + xi.by_index(xi.fibers.index(xk), b) * xi.by_index(i, cc).diff(xk)
                    r = r - xi.by_index(xi.fibers.index(xk), cc) * xi.by_index(i, b).diff(xk)
                for a in range(c.g):
                    k = c(a, b, cc)
                    if k:
                        r = r + xi.by_index(i, a).scale(k)
                if r:
                    out[(x, xi.forms[b], xi.forms[cc])] = r
    return out


def lie_identity_check(xi: XiTable, c: StructureConstants, task: str = "lie") -> VerificationReport:
    rep = VerificationReport(task, "lie")
    bad = lie_identity_residuals(xi, c)
    for (x, b, cc), r in bad.items():
        rep.residuals[f"{x}; {b}, {cc}"] = str(r)
    rep.metrics["violations"] = len(bad)
    if bad:
        rep.fail()
    return rep


def associated_check(xi: XiTable, sys: ConnectionSystem, target: PdeResidual | None = None,
                     task: str = "associated") -> VerificationReport:
    """Verify the structure equations of the induced connection in the associated bundle.

    On the chart extended by the fiber coordinates ``X^I`` the identity
    ``d th^I - th^K ^ th^I_K + xi^I_A Omega^A = 0`` must hold exactly, with
    ``th^I = dX^I - xi^I_A w^A`` and ``th^I_K = -d xi^I_A/dX^K w^A``. The
    curvature term ``-xi^I_A Omega^A`` is pulled back and, if a target is
    given, factored against it.
    """
    rep = VerificationReport(task, "associated")
    if tuple(xi.forms) != sys.names:
        rep.error("xi table forms do not match the connection forms")
        return rep
    bad = lie_identity_residuals(xi, sys.constants)
    if bad:
        for (x, b, cc), r in bad.items():
            rep.residuals[f"lie {x}; {b}, {cc}"] = str(r)
        rep.error("Lie identities violated; associated check aborted")
        return rep
    new = [x for x in xi.fibers if x not in sys.chart.atoms]
    ext = sys.chart.extend(*new)
    chart = ext.chart
    forms = list(sys.on(chart).values())
    omegas = curvature(sys, chart)
    g = sys.constants.g
    theta = {}
    for i, x in enumerate(xi.fibers):
        t = chart.d(x)
        for a in range(g):
            t = t - forms[a] * xi.by_index(i, a)
        theta[x] = t
    s = Section.symbolic(ext)
    ctx = ext.jet_context
    for i, x in enumerate(xi.fibers):
        lhs = d(theta[x])
        rhs = chart.zero(2)
        for k, xk in enumerate(xi.fibers):
            tk = chart.zero(1)
            for a in range(g):
                tk = tk - forms[a] * xi.by_index(i, a).diff(xk)
            rhs = rhs + wedge(theta[xk], tk)
        curv = chart.zero(2)
        for a in range(g):
            curv = curv - omegas[a] * xi.by_index(i, a)
        resid = lhs - rhs - curv
        if resid:
            rep.residuals[x] = str(resid)
            rep.fail(f"structure equation for {x} does not close")
            continue
        term = top_coefficient(pullback(curv, s)) if len(ext.base) == 2 else None
        if term is None:
            continue
        if target is None:
            rep.extracted[x] = str(term)
            continue
        try:
            q = factor_against(term, target.F, ctx)
            rep.multipliers[x] = str(q)
        except FactorError:
            rep.residuals[x] = str(term)
            rep.fail(f"curvature term for {x} is not a multiple of the target")
    return rep
